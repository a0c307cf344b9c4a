fn main() {
    std::process::exit(commit_tl::cli::run());
}
