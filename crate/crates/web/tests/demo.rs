use polyroute_web::{check_ur_text, params_text, plan_json};

const DUMBBELL: &str = "######....######\n######....######\n################\n################\n######....######\n######....######\n";

#[test]
fn params_lists_profile_keys() {
    let t = params_text(DUMBBELL).unwrap();
    assert!(t.contains("bottleneck=2"));
    assert!(t.contains("area=80"));
}

#[test]
fn check_ur_answers_both_ways() {
    assert!(check_ur_text(DUMBBELL).unwrap().starts_with("yes"));
    assert!(check_ur_text("###\n").unwrap().starts_with("no"));
    assert!(check_ur_text("#.#\n").is_err());
}

#[test]
fn plan_reports_metrics_and_frames() {
    let v: serde_json::Value = serde_json::from_str(&plan_json(DUMBBELL, 3, "auto").unwrap()).unwrap();
    assert!(v["makespan"].as_u64().unwrap() >= v["lower_bound"].as_u64().unwrap());
    assert!(v["start_svg"].as_str().unwrap().starts_with("<svg"));
    assert!(plan_json(DUMBBELL, 3, "warp").is_err());
    assert!(plan_json("###\n", 3, "any").is_err());
}
