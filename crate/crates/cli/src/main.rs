fn main() {
    phan_cli::run()
}
