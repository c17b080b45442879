//! Run the built-in acceptance criteria, the same ones behind `quartic-moduli verify`.

fn main() {
    let results = quartic_moduli::selfcheck::run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} passed", results.len());
}
