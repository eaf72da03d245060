fn main() {
    let outcome = rainbow_schur::cli::dispatch(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    std::process::exit(outcome.status);
}
