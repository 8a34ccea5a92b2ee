use std::io;

fn main() {
    let code = isingcw::cli::run(std::env::args_os(), &mut io::stdout().lock());
    std::process::exit(code);
}
