// Every example is compiled into this test binary and run to completion.

macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(boltzmann_gibbs, boltzmann_gibbs_runs, "boltzmann_gibbs.rs");
example!(debt_cap, debt_cap_runs, "debt_cap.rs");
example!(reserve_ratio, reserve_ratio_runs, "reserve_ratio.rs");
example!(multiplicative, multiplicative_runs, "multiplicative.rs");
example!(
    saving_propensity,
    saving_propensity_runs,
    "saving_propensity.rs"
);
example!(unlimited_debt, unlimited_debt_runs, "unlimited_debt.rs");
example!(entropy_growth, entropy_growth_runs, "entropy_growth.rs");
example!(exact_oracle, exact_oracle_runs, "exact_oracle.rs");
example!(
    kinetic_equation,
    kinetic_equation_runs,
    "kinetic_equation.rs"
);
example!(
    inverse_population,
    inverse_population_runs,
    "inverse_population.rs"
);
example!(
    interest_and_bankruptcy,
    interest_and_bankruptcy_runs,
    "interest_and_bankruptcy.rs"
);
example!(
    experiment_config,
    experiment_config_runs,
    "experiment_config.rs"
);
