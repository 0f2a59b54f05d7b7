use clap::Parser;

fn main() {
    let cli = alphaproj_cli::Cli::parse();
    let code = alphaproj_cli::run(
        cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
