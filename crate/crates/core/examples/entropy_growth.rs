// Entropy starts at zero (everyone holds the same amount) and climbs to
// the maximum allowed for the given mean: that of the exponential.

use econophys::stats::{
    entropy_per_agent, max_entropy_reference, window_histograms, MoneyHistogram,
};
use econophys::{BoundaryPolicy, RuleSpec, SimConfig, Simulation};

pub fn run_example() -> econophys::Result<()> {
    let config = SimConfig::new(
        1000,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::no_debt(),
    )
    .sweeps(200)
    .snapshot_every(1)
    .seed(17);
    let width = config.effective_bin_width();
    let window = 10;

    // Pool each window over 50 replicates so the entropy is not dominated
    // by sampling noise.
    let mut initial = MoneyHistogram::new(width);
    let mut windows: Vec<MoneyHistogram> = Vec::new();
    for r in 0..50 {
        let record = Simulation::new(&config, r)?.run()?;
        initial.merge(&record.snapshots[0].histogram)?;
        for (k, (_, h)) in window_histograms(&record.snapshots, window)?
            .into_iter()
            .enumerate()
        {
            if windows.len() == k {
                windows.push(MoneyHistogram::new(width));
            }
            windows[k].merge(&h)?;
        }
    }
    println!("{:>4} {:.4}", 0, entropy_per_agent(&initial)?);
    for (k, h) in windows.iter().enumerate() {
        let s = entropy_per_agent(h)?;
        let bar = "#".repeat((s * 15.0) as usize);
        println!("{:>4} {s:.4} {bar}", (k as u64 + 1) * window);
    }
    let reference = max_entropy_reference(windows.last().unwrap(), 0.0);
    println!("bin width {width}, maximum entropy at this mean {reference:.4}");
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
