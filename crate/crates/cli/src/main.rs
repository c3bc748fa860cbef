fn main() {
    println!("overlap-sim");
}
