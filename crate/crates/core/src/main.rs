use std::io::Write;

fn main() {
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    let code = csa_tower::cli::run(std::env::args_os().skip(1), &mut input, &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
