macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(constants_table, "constants_table.rs");
example!(quadrature, "quadrature.rs");
example!(profiles, "profiles.rs");
example!(quotients, "quotients.rs");
example!(proof_replay, "proof_replay.rs");
example!(optimizer_search, "optimizer_search.rs");
example!(young_convolution, "young_convolution.rs");
example!(stein_weiss, "stein_weiss.rs");
example!(reports, "reports.rs");

#[test]
fn constants_table_runs() {
    constants_table::run_example().unwrap();
}

#[test]
fn quadrature_runs() {
    quadrature::run_example().unwrap();
}

#[test]
fn profiles_runs() {
    profiles::run_example().unwrap();
}

#[test]
fn quotients_runs() {
    quotients::run_example().unwrap();
}

#[test]
fn proof_replay_runs() {
    proof_replay::run_example().unwrap();
}

#[test]
fn optimizer_search_runs() {
    optimizer_search::run_example().unwrap();
}

#[test]
fn young_convolution_runs() {
    young_convolution::run_example().unwrap();
}

#[test]
fn stein_weiss_runs() {
    stein_weiss::run_example().unwrap();
}

#[test]
fn reports_runs() {
    reports::run_example().unwrap();
}
