fn main() {
    // deeply nested expressions recurse in the parser and printer
    let child = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(|| mcfl_core::cli::run(std::env::args_os()))
        .expect("spawn main thread");
    let code = child.join().unwrap_or(101);
    std::process::exit(code);
}
