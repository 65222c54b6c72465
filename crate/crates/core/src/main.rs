use std::io;

fn main() {
    let code = abelian_returns::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
