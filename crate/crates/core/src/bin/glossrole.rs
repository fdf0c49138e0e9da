use clap::Parser;

fn main() {
    let cli = glossrole::cli::Cli::parse();
    let code = glossrole::cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
