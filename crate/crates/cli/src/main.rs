use clap::Parser;
use parasqueeze_cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    if let Err(e) = run(&cli).and_then(|out| emit(&cli, &out)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
