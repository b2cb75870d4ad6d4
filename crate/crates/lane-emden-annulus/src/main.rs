fn main() {
    std::process::exit(lane_emden_annulus::cli::run());
}
