fn main() { println!("{}", terminal3::placeholder()); }
