fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(willmore_lab::cli::run(
        &args,
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    ));
}
