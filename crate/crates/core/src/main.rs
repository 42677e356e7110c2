fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let code = specforge::cli::main_with(std::env::args(), &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
