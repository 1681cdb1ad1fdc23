//! Golden files and schema stability for every machine-readable surface:
//! graph export, flat config, profile/growth CSV, campaign JSONL and
//! summary CSV.

use wiretap_ldpc::de::{profile_csv, run_de_traced, DeConfig};
use wiretap_ldpc::ensemble::{CodeConfig, EnsembleParams, WiretapChannelSpec};
use wiretap_ldpc::sampler::{sample_chain, sample_smoothed, SmoothedMode};
use wiretap_ldpc::seeding;
use wiretap_ldpc::wiretap::{run_campaign, summary_csv_row, CampaignConfig, SUMMARY_CSV_HEADER};

/// Frozen export of the seed-7 chain instance: byte-stable across platforms
/// and releases.
const GOLDEN_CHAIN_EXPORT: &str = "\
12 10 5
1 0 2 0 2
1 1 2 1 3
1 2 4 1 3 5 6
1 3 4 0 2 4 7
1 4 6 2 3 5 7 8 11
1 5 6 0 1 4 6 9 10
1 6 4 5 7 10 11
1 7 4 4 6 8 9
1 8 2 8 11
1 9 2 9 10
2 0 4 0 1 2 3
2 1 8 0 1 2 3 4 5 6 7
2 2 12 0 1 2 3 4 5 6 7 8 9 10 11
2 3 8 4 5 6 7 8 9 10 11
2 4 4 8 9 10 11
";

#[test]
fn chain_export_golden() {
    let p = EnsembleParams::chain(3, 3, 6, 12, 1).with_m(4);
    let g = sample_chain(&p, &mut seeding::root_rng(7)).unwrap();
    assert_eq!(g.export_text(), GOLDEN_CHAIN_EXPORT);
}

#[test]
fn smoothed_export_deterministic() {
    let p = EnsembleParams::smoothed(3, 3, 6, 6, 2, 2).with_m(12);
    for mode in [
        SmoothedMode::Balanced,
        SmoothedMode::Iid,
        SmoothedMode::StrictProfiles,
    ] {
        let a = sample_smoothed(&p, mode, &mut seeding::root_rng(3)).unwrap();
        let b = sample_smoothed(&p, mode, &mut seeding::root_rng(3)).unwrap();
        assert_eq!(a.graph.export_text(), b.graph.export_text(), "{mode:?}");
    }
}

#[test]
fn export_lines_parse_back() {
    let p = EnsembleParams::smoothed(3, 3, 6, 12, 3, 2).with_m(24);
    let g = sample_smoothed(&p, SmoothedMode::Balanced, &mut seeding::root_rng(4))
        .unwrap()
        .graph;
    let text = g.export_text();
    let mut lines = text.lines();
    let header: Vec<usize> = lines
        .next()
        .unwrap()
        .split(' ')
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(header, vec![g.n(), g.type1_checks(), g.type2_checks()]);
    let mut seen = 0;
    for line in lines {
        let tok: Vec<i64> = line.split(' ').map(|t| t.parse().unwrap()).collect();
        let (t, _row, deg) = (tok[0], tok[1], tok[2] as usize);
        assert!(t == 1 || t == 2);
        assert_eq!(tok.len(), 3 + deg);
        let vars = &tok[3..];
        assert!(vars.windows(2).all(|w| w[0] <= w[1]), "sorted");
        assert!(vars.iter().all(|&v| (v as usize) < g.n()));
        seen += 1;
    }
    assert_eq!(seen, g.type1_checks() + g.type2_checks());
}

#[test]
fn config_golden_and_roundtrip() {
    let cfg = CodeConfig {
        params: EnsembleParams::smoothed(3, 3, 6, 12, 20, 3).with_m(100),
        channel: Some(WiretapChannelSpec::new(0.5, 0.75).unwrap()),
    };
    let text = cfg.to_config_string();
    assert_eq!(
        text,
        "l1=3\nl2=3\nr1=6\nr2=12\nL=20\nw=3\nM=100\nvariant=smoothed\neps_m=0.5\neps_w=0.75\n"
    );
    assert_eq!(CodeConfig::from_config_string(&text).unwrap(), cfg);
}

#[test]
fn profile_csv_stable_schema() {
    let p = EnsembleParams::smoothed(2, 1, 6, 6, 2, 1);
    let run = run_de_traced(&p, &DeConfig::new(0.3)).unwrap();
    let csv = profile_csv(&run, 2);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# wtldpc de-profile schema v1"));
    assert_eq!(lines.next(), Some("iter,position,x1,x2"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        cols[0].parse::<u64>().unwrap();
        cols[1].parse::<i64>().unwrap();
        cols[2].parse::<f64>().unwrap();
        cols[3].parse::<f64>().unwrap();
    }
}

#[test]
fn summary_csv_schema() {
    let p = EnsembleParams::chain(3, 3, 6, 12, 2).with_m(8);
    let ch = WiretapChannelSpec::new(0.4, 0.6).unwrap();
    let out = run_campaign(&p, &ch, &CampaignConfig::new(4, 1)).unwrap();
    let row = summary_csv_row(&p, &out.summary);
    assert_eq!(
        SUMMARY_CSV_HEADER.lines().last().unwrap(),
        "L,M,trials,R_nominal,R_actual_mean,Pe_bob,Re_mean,Re_stderr"
    );
    let cols: Vec<&str> = row.trim().split(',').collect();
    assert_eq!(cols.len(), 8);
    assert_eq!(cols[0], "2");
    assert_eq!(cols[1], "8");
    assert_eq!(cols[2], "4");
    for v in &cols[3..] {
        v.parse::<f64>().unwrap();
    }
}
