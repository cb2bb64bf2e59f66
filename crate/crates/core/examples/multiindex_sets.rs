//! The four families of paired walks and their sizes.
//!
//! ```text
//! cargo run --example multiindex_sets
//! ```

use jacobi::multiindex::{self, Variant};

pub fn run_example() -> jacobi::Result<()> {
    for m in 1..=4 {
        let set = multiindex::generate(Variant::IPlus, m)?;
        let shown: Vec<String> = set.iter().map(ToString::to_string).collect();
        println!("I_{m}+ ({}): {}", set.len(), shown.join(" "));
    }
    let sizes: Vec<usize> =
        (1..=4).map(|m| multiindex::generate(Variant::IPlus, m).map(|s| s.len())).collect::<jacobi::Result<_>>()?;
    assert_eq!(sizes, [1, 2, 3, 6]);

    println!("\n{:>3} {:>10} {:>10} {:>10} {:>10}", "m", "I", "I_hat", "I+", "I_hat+");
    for m in 1..=12 {
        let row: Vec<u64> = [Variant::I, Variant::IHat, Variant::IPlus, Variant::IHatPlus]
            .into_iter()
            .map(|v| multiindex::cardinality(v, m))
            .collect::<jacobi::Result<_>>()?;
        println!("{m:>3} {:>10} {:>10} {:>10} {:>10}", row[0], row[1], row[2], row[3]);
    }

    // Large depths can be streamed without materialising the set.
    let mut count = 0u64;
    multiindex::for_each(Variant::IHatPlus, 16, |_, _| count += 1)?;
    assert_eq!(count, multiindex::cardinality(Variant::IHatPlus, 16)?);
    println!("\nstreamed {count} walks of depth 16");
    assert!(multiindex::generate(Variant::I, 25).is_err());
    Ok(())
}

fn main() -> jacobi::Result<()> {
    run_example()
}
