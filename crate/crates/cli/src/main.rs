fn main() {
    let out = mirror_arith_cli::run(std::env::args_os());
    if out.code == 2 && out.document.is_null() {
        eprintln!("{}", out.summary);
    } else if !out.summary.is_empty() {
        println!("{}", out.summary);
    }
    std::process::exit(out.code);
}
