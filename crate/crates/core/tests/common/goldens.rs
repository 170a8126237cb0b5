//! Worked examples replayed in canonical syntax. Each check returns the
//! first mismatch; `tests/golden.rs` runs them as tests and the acceptance
//! runner times them.

use lctrs_core::constraints::{FiniteDomain, Solver};
use lctrs_core::cterms::{ext, rmv, ECTerm};
use lctrs_core::equivalence::{equiv_general, equiv_oracle, subsumes_oracle};
use lctrs_core::rewriting::{
    all_successors, apply_step, find_redexes, reachable_deferred, step_nonquantified, Redex,
};
use lctrs_core::rules::lvf;
use lctrs_core::syntax::{parse_source, print_cterm, print_nqterm, print_rule, SourceFile};
use lctrs_core::terms::{match_linear, NameGen, Position, Subst, Term, Var};
use lctrs_core::Error;

use super::golden as load;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($c:expr) => {
        if !$c {
            return Err(format!("line {}: {}", line!(), stringify!($c)));
        }
    };
}

macro_rules! ensure_eq {
    ($a:expr, $b:expr) => {{
        let (a, b) = (&$a, &$b);
        if a != b {
            return Err(format!("line {}: {:?} != {:?}", line!(), a, b));
        }
    }};
}

trait Or<T> {
    fn or_msg(self) -> Result<T, String>;
}

impl<T> Or<T> for lctrs_core::Result<T> {
    fn or_msg(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

impl<T> Or<T> for Option<T> {
    fn or_msg(self) -> Result<T, String> {
        self.ok_or_else(|| "missing".to_string())
    }
}

fn ec(file: &SourceFile, label: &str) -> Result<ECTerm, String> {
    file.cterm(label).or_msg()?.ecterm().or_msg()
}

fn sigma(pairs: &[(&str, Term)]) -> Subst {
    pairs.iter().map(|(x, t)| (Var::int(x), t.clone())).collect()
}

pub const ALL: [(&str, fn() -> Check); 10] = [
    ("redex and step", redex_example_step),
    ("intro: clashing rule variables", intro_clashing_variables),
    ("intro: three legacy steps", intro_legacy_steps),
    ("intro: legacy reducts not equivalent", intro_reducts_not_equivalent),
    ("embedding: subsumption on -1..5", embedding_subsumes_legacy_reducts),
    ("second intro: needs equivalence", second_intro_needs_equivalence),
    ("variable tracing", variable_tracing),
    ("ext and rmv", ext_and_rmv),
    ("left-value-free", left_value_free),
    ("round trip", golden_files_round_trip),
];

pub fn redex_example_step() -> Check {
    let file = load("redex.lctrs");
    let solver = Solver::builtin();
    let start = ec(&file, "start")?;
    let rho = file.rule("rho").or_msg()?;
    let redexes = find_redexes(&start, rho, &solver).or_msg()?;
    ensure_eq!(redexes.len(), 1);
    ensure_eq!(redexes[0].position, Position::root());
    ensure_eq!(redexes[0].matcher.to_string(), "{x' ↦ x}");
    let steps = all_successors(&start, &file.rules, &solver).or_msg()?;
    ensure_eq!(steps.len(), 1);
    ensure_eq!(
        print_cterm(&steps[0].target, None),
        "(cterm :logical (y':Int) (g y') :exists (x:Int) :guard (and (> x 0) (and (>= x 0) (> y' x))))"
    );
    Ok(())
}

pub fn intro_clashing_variables() -> Check {
    let file = load("ex1_1.lctrs");
    let solver = Solver::builtin();
    let start = ec(&file, "start")?;
    let steps = all_successors(&start, std::slice::from_ref(file.rule("rho_xy").or_msg()?), &solver).or_msg()?;
    ensure_eq!(steps.len(), 1);
    ensure_eq!(steps[0].redex.renaming.to_string(), "{x ↦ x#1}");
    ensure_eq!(
        print_cterm(&steps[0].target, None),
        "(cterm :logical (y:Int) (g y) :exists (x:Int) :guard (and (> x 2) (and (>= x 1) (>= (+ x 1) y))))"
    );
    Ok(())
}

pub fn intro_legacy_steps() -> Check {
    let file = load("ex1_1.lctrs");
    let solver = Solver::builtin();
    let rho = file.rule("rho").or_msg()?;
    let start = file.cterm("start").or_msg()?.nqterm().or_msg()?;
    let x = Term::var(&Var::int("x"));
    let y = Term::var(&Var::int("y"));
    let root = Position::root();

    let s = step_nonquantified(&start, rho, &root, &sigma(&[("x'", x.clone()), ("y'", Term::int(3))]), &solver).or_msg()?;
    ensure_eq!(print_nqterm(&s.target, None), "(cterm :logical (x:Int) (g 3) :guard (> x 2))");

    let s = step_nonquantified(&start, rho, &root, &sigma(&[("x'", x.clone()), ("y'", x.clone())]), &solver).or_msg()?;
    ensure_eq!(print_nqterm(&s.target, None), "(cterm :logical (x:Int) (g x) :guard (> x 2))");

    let start_y = file.cterm("start_y").or_msg()?.nqterm().or_msg()?;
    let s = step_nonquantified(&start_y, rho, &root, &sigma(&[("x'", x), ("y'", y)]), &solver).or_msg()?;
    ensure_eq!(
        print_nqterm(&s.target, None),
        "(cterm :logical (x:Int y:Int) (g y) :guard (and (> x 2) (> 0 y)))"
    );
    Ok(())
}

pub fn intro_reducts_not_equivalent() -> Check {
    let file = load("ex1_1.lctrs");
    let solver = Solver::builtin();
    let g3 = ec(&file, "g3")?;
    let gx = ec(&file, "gx")?;
    ensure_eq!(print_cterm(&g3, None), "(cterm :logical () (g 3) :exists (x:Int) :guard (> x 2))");
    ensure!(!equiv_general(&g3, &gx, &solver).or_msg()?.equal);
    ensure!(!equiv_oracle(&g3, &gx, &FiniteDomain::new(0, 4), &solver).or_msg()?);
    Ok(())
}

pub fn embedding_subsumes_legacy_reducts() -> Check {
    let file = load("ex1_1.lctrs");
    let solver = Solver::builtin();
    let start = ec(&file, "start")?;
    let steps = all_successors(&start, std::slice::from_ref(file.rule("rho").or_msg()?), &solver).or_msg()?;
    ensure_eq!(steps.len(), 1);
    let reduct = &steps[0].target;
    ensure_eq!(
        print_cterm(reduct, None),
        "(cterm :logical (y':Int) (g y') :exists (x:Int) :guard (and (> x 2) (and (>= x 1) (>= (+ x 1) y'))))"
    );
    let dom = FiniteDomain::new(-1, 5);
    for label in ["g3", "gx"] {
        let legacy = ec(&file, label)?;
        ensure!(subsumes_oracle(&legacy, reduct, &dom, &solver).or_msg()?);
    }
    ensure!(!subsumes_oracle(reduct, &ec(&file, "g3")?, &dom, &solver).or_msg()?);
    Ok(())
}

pub fn second_intro_needs_equivalence() -> Check {
    let file = load("ex1_2.lctrs");
    let solver = Solver::builtin();
    let rho = file.rule("rho").or_msg()?;
    let start = file.cterm("start").or_msg()?.nqterm().or_msg()?;
    let x = Term::var(&Var::int("x"));
    let y = Term::var(&Var::int("y"));
    let mut candidates = vec![x.clone(), y.clone()];
    candidates.extend((-5..=5).map(Term::int));
    for z in candidates {
        let s = sigma(&[("x'", x.clone()), ("y'", y.clone()), ("z'", z)]);
        let r = step_nonquantified(&start, rho, &Position::root(), &s, &solver);
        ensure!(matches!(r, Err(Error::NotARedex(_))));
    }

    let start_z = file.cterm("start_z").or_msg()?.nqterm().or_msg()?;
    ensure!(equiv_general(&ext(&start), &ext(&start_z), &solver).or_msg()?.equal);
    let z = Term::var(&Var::int("z"));
    let s = step_nonquantified(&start_z, rho, &Position::root(), &sigma(&[("x'", x), ("y'", y), ("z'", z)]), &solver)
        .or_msg()?;
    ensure_eq!(
        print_nqterm(&s.target, None),
        "(cterm :logical (x:Int y:Int z:Int) (g z) :guard (and (< x y) (= (+ (+ x y) 1) z)))"
    );

    let steps = all_successors(&ext(&start), &file.rules, &solver).or_msg()?;
    ensure_eq!(steps.len(), 1);
    ensure_eq!(
        print_cterm(&steps[0].target, None),
        "(cterm :logical (z':Int) (g z') :exists (x:Int y:Int) :guard (and (< x y) (= (+ (+ x y) 1) z')))"
    );
    Ok(())
}

pub fn variable_tracing() -> Check {
    let file = load("tracing.lctrs");
    let solver = Solver::builtin();
    let start = ec(&file, "start")?;
    let rho = file.rule("rho").or_msg()?;
    // Guard entailment needs ⊨ x ≥ 0 ⇒ y ≥ 0, which fails, so the displayed step
    // is not a redex; the step equations are replayed directly.
    ensure!(find_redexes(&start, rho, &solver).or_msg()?.is_empty());
    let p: Position = "1".parse().or_msg()?;
    let gamma = match_linear(rho.lhs(), start.term().at(&p).or_msg()?).or_msg()?.or_msg()?;
    let redex = Redex {
        position: p,
        rule: rho.clone(),
        matcher: gamma,
        renaming: Subst::new(),
    };
    let t = apply_step(&start, &redex).or_msg()?.target;
    ensure_eq!(
        print_cterm(&t, None),
        "(cterm :logical (v:Int w:Int) (g v w) :exists (x:Int y:Int) :guard (and (>= x 0) (>= y 0)))"
    );
    ensure!(!t.all_vars().contains(&Var::int("z")));
    Ok(())
}

pub fn ext_and_rmv() -> Check {
    let file = load("ext_rmv.lctrs");
    for (nq, ec_label) in [("nq1", "ec1"), ("nq2", "ec2")] {
        let n = file.cterm(nq).or_msg()?.nqterm().or_msg()?;
        let e = ec(&file, ec_label)?;
        ensure_eq!(ext(&n), e);
        ensure_eq!(rmv(&e), n);
    }
    ensure_eq!(
        print_cterm(&ext(&file.cterm("nq2").or_msg()?.nqterm().or_msg()?), None),
        "(cterm :logical (x:Int y:Int) (h x y) :exists (z:Int) :guard (and (< x y) (= (+ (+ x y) 1) z)))"
    );
    Ok(())
}

pub fn left_value_free() -> Check {
    let file = load("lvf.lctrs");
    let solver = Solver::builtin();
    let rho = file.rule("rho").or_msg()?;
    let hat = lvf(rho, &mut NameGen::new()).or_msg()?;
    ensure_eq!(print_rule(&hat), "(rule rho :lvars (y:Int) (f y) 0 :guard (and true (= y 0)))");

    let f0 = ec(&file, "f0")?;
    let fx = ec(&file, "fx")?;
    let zero = ec(&file, "zero")?;
    ensure!(equiv_general(&f0, &fx, &solver).or_msg()?.equal);

    // ρ itself does not commute with the equivalence
    ensure_eq!(all_successors(&f0, std::slice::from_ref(rho), &solver).or_msg()?.len(), 1);
    ensure!(all_successors(&fx, std::slice::from_ref(rho), &solver).or_msg()?.is_empty());

    let a = all_successors(&f0, std::slice::from_ref(&hat), &solver).or_msg()?;
    let b = all_successors(&fx, std::slice::from_ref(&hat), &solver).or_msg()?;
    ensure_eq!(a.len(), 1);
    ensure_eq!(b.len(), 1);
    ensure_eq!(
        print_cterm(&a[0].target, None),
        "(cterm :logical () 0 :guard (and true (and true (= 0 0))))"
    );
    ensure_eq!(
        print_cterm(&b[0].target, None),
        "(cterm :logical () 0 :exists (x:Int) :guard (and (= x 0) (and true (= x 0))))"
    );
    ensure!(equiv_general(&a[0].target, &b[0].target, &solver).or_msg()?.equal);
    ensure!(equiv_general(&b[0].target, &zero, &solver).or_msg()?.equal);

    let found = reachable_deferred(&fx, &zero, &[hat], 3, 100, &solver).or_msg()?;
    let d = found.derivation.or_msg()?;
    ensure_eq!(d.steps.len(), 1);
    ensure_eq!(found.equivalence_checks, found.endpoints_explored);
    Ok(())
}

pub fn golden_files_round_trip() -> Check {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("lctrs") {
            continue;
        }
        let a = parse_source(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).or_msg()?;
        let printed = a.to_string();
        let b = parse_source(&printed).or_msg()?;
        ensure_eq!(a.rules, b.rules);
        ensure_eq!(a.cterms, b.cterms);
        ensure_eq!(printed, b.to_string());
        n += 1;
    }
    ensure!(n >= 6);
    Ok(())
}
