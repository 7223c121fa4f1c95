use clap::Parser;

fn main() {
    let cli = match warpspec_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap reserves exit code 2 for usage problems; here 2 means
            // "hypothesis violated", so argument errors exit 1 instead
            let is_help = !err.use_stderr();
            let _ = err.print();
            std::process::exit(if is_help { 0 } else { 1 });
        }
    };
    std::process::exit(warpspec_cli::run(cli));
}
