use std::io::Write;

// certificates and normal forms are built recursively over the term
const STACK_SIZE: usize = 512 * 1024 * 1024;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let outcome = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || kstar_cli::run(&args, &mut std::io::stdin().lock()))
        .expect("spawn worker thread")
        .join()
        .unwrap_or_else(|_| std::process::exit(kstar_cli::exit::INTERNAL));
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
