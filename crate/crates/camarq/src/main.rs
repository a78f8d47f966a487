use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "camarq", about = "Decorated marked surfaces and string categories")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a surface spec file.
    Validate {
        #[arg(long)]
        spec: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Validate { spec } => {
            let text = std::fs::read_to_string(&spec).expect("read spec");
            let s: camarq::surface::SurfaceSpec = serde_json::from_str(&text).expect("parse");
            match s.validate() {
                Ok((n, aleph)) => println!("n = {n}, aleph = {aleph}"),
                Err(e) => {
                    eprintln!("{e}");
                    std::process::exit(2);
                }
            }
        }
    }
}
