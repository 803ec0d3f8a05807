use msc_cli::commands::{self, SCHEMA};
use msc_cli::dsl::parse;
use msc_cli::suites::{run_suite, Context, Suite};
use proptest::prelude::*;

const COORDINATES: [&str; 6] = ["x1", "x2", "q", "p1_1", "p1_2", "p"];

fn scalar() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        prop::sample::select(COORDINATES.to_vec()).prop_map(str::to_string),
        (1u32..6, 1u32..5).prop_map(|(a, b)| if b == 1 { a.to_string() } else { format!("{a}/{b}") }),
        (prop::sample::select(COORDINATES.to_vec()), 2u32..4).prop_map(|(c, k)| format!("{c}**{k}")),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} * {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
}

fn document() -> impl Strategy<Value = String> {
    let name = prop::sample::select(COORDINATES.to_vec());
    (scalar(), scalar(), scalar(), name.clone(), name.clone(), name).prop_map(|(f, g, h, a, b, c)| {
        format!(
            "chart extended n=2 N=1\nlet f = {f}\nlet a = {g} * d({a}) ^ d({b}) + d(f) ^ d({c})\nlet X = {h} * @{a} ^ @{b} - @{c} ^ @{a}\nlet w = d(a) - omega\n"
        )
    })
}

fn msc(args: &[&str]) -> commands::Outcome {
    commands::run(std::iter::once("msc").chain(args.iter().copied()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn render_then_parse_is_the_identity(source in document()) {
        let doc = parse(&source).unwrap();
        let rendered = doc.render();
        let again = parse(&rendered).unwrap();
        prop_assert_eq!(&again, &doc);
        prop_assert_eq!(again.render(), rendered);
        for (name, value) in doc.definitions() {
            prop_assert_eq!(again.get(name).unwrap(), value);
        }
    }

    #[test]
    fn suite_reports_depend_only_on_their_inputs(seed in any::<u64>(), trials in 1usize..4) {
        let ctx = Context::new(2, 1, seed);
        let first = run_suite(Suite::Calculus, &ctx, trials).unwrap();
        let second = run_suite(Suite::Calculus, &ctx, trials).unwrap();
        prop_assert_eq!(first.render(false), second.render(false));
        prop_assert_eq!(first.to_json(false), second.to_json(false));
        prop_assert!(first.passed());
    }
}

#[test]
fn json_output_is_versioned() {
    let out = msc(&["eval", "--expr", "theta", "--json"]);
    assert_eq!(out.code, 0);
    let json: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(json["schema"], SCHEMA);
    assert_eq!(json["value"], "p*d(x1)^d(x2) + p1_2*d(x1)^d(q) - p1_1*d(x2)^d(q)");
}

#[test]
fn parse_errors_exit_with_one() {
    let out = msc(&["eval", "--expr", "q +"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("syntax error"), "{}", out.stderr);
    assert_eq!(msc(&["check", "--suite", "nope"]).code, 1);
    assert_eq!(msc(&["kernel"]).code, 1);
}

#[test]
fn help_exits_cleanly() {
    let out = msc(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("momentum-map"));
}

#[test]
fn de_donder_weyl_command_verifies_its_field() {
    let out = msc(&["ddw", "--n", "3", "--H", "1/2*p1_1**2 + x1*q*p1_3"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.ends_with(": holds\n"), "{}", out.stdout);
    assert_eq!(out.stdout.lines().filter(|l| l.starts_with('X')).count(), 3);
}

#[test]
fn connection_command_lists_every_coefficient() {
    let dir = std::env::temp_dir().join(format!("msc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("conn.msc");
    std::fs::write(&file, "chart base n=1 N=1\ngammaE 1 1 = x1*q\n").unwrap();
    let out = msc(&["connection", "--bundle", "VstarE", "--file", file.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "# VstarE on VstarE n=1 N=1\nC[x1][pv1] = -x1*pv1\n");
}
