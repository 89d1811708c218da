use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = floorwalk_service::cli::Cli::parse();
    std::process::exit(floorwalk_service::cli::run(cli));
}
