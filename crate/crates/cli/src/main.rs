use std::io;

fn main() {
    let code = ckl_pos_cli::run_cli(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr());
    std::process::exit(code);
}
