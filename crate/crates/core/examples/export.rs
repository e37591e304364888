//! Print the system file of a corpus entry, e.g. `cargo run --example export -- kepler3d`.

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "freeparticle".into());
    let entry = noetherkit::corpus::load(name.parse().expect("corpus name")).expect("corpus entry");
    print!("{}", noetherkit::sysfile::export_entry(&entry));
}
