use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gamereduce::clm::{self, oracularize_clm, pad, pad_verifier, parse_clf, sample_padded, Clf, TypedClm, TypedGame};
use gamereduce::cs::{degree_profile, parse_system, write_csx, write_dimacs, ConstraintDistribution, ConstraintSystem};
use gamereduce::games::{constraint_variable_game, parse_nlg, write_nlg, DummyGame, NonlocalGame};
use gamereduce::rational::{format_rational, Rational};
use gamereduce::reductions::{
    build_slc, parse_slc, to_3sat5, two_oracularize, uniformize_by_repetition, verify_slc, write_slc,
    PipelineParams, VerifyParams,
};
use gamereduce::values::{
    classical_value_exact, classical_value_search, defect_cv, defect_definitional, parse_operator_families,
    parse_strategy, round_povm_to_pvm, seesaw_lower_bound, strategy_value, system_value_exact, write_strategy, CvStrategy,
    FiniteDimStrategy,
};
use gamereduce::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{ClmOp, Cli, Command, Global, ValueMethod};

pub struct Report {
    pub text: String,
    /// False when a checked property failed.
    pub ok: bool,
}

fn report(text: String) -> Report {
    Report { text, ok: true }
}

pub fn emit(global: &Global, text: &str) -> Result<()> {
    match &global.out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn read_system(path: &Path) -> Result<(ConstraintSystem, Option<ConstraintDistribution>)> {
    parse_system(&read(path)?)
}

/// DIMACS for `.cnf` paths, CSX otherwise.
fn write_system(path: &Path, s: &ConstraintSystem, pi: Option<&ConstraintDistribution>) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "cnf") {
        write_dimacs(s, pi)?
    } else {
        write_csx(s, pi)?
    };
    Ok(fs::write(path, text)?)
}

fn or_uniform(s: &ConstraintSystem, pi: Option<ConstraintDistribution>) -> ConstraintDistribution {
    pi.unwrap_or_else(|| ConstraintDistribution::uniform(s.num_constraints()))
}

/// An `nlg` file, or the constraint-variable game of a system file.
fn read_game(path: &Path) -> Result<NonlocalGame> {
    let text = read(path)?;
    if text.trim_start().starts_with("nlg") {
        return parse_nlg(&text);
    }
    let (s, pi) = parse_system(&text)?;
    let pi = or_uniform(&s, pi);
    constraint_variable_game(&s, &pi)
}

fn histogram(h: &std::collections::BTreeMap<usize, usize>) -> String {
    h.iter().map(|(d, c)| format!("{d}:{c}")).collect::<Vec<_>>().join(" ")
}

pub fn run(cli: &Cli) -> Result<Report> {
    let cap = cli.global.cap;
    match &cli.command {
        Command::To3sat5 {
            input,
            output,
            seed,
            degree,
            lambda_min,
        } => {
            let (s, pi) = read_system(input)?;
            let params = PipelineParams {
                degree: *degree,
                lambda_min: *lambda_min,
                seed: *seed,
                ..PipelineParams::default()
            };
            let out = to_3sat5(&s, pi.as_ref(), &params)?;
            write_system(output, &out.system, out.distribution.as_ref())?;
            let profile = degree_profile(&out.system);
            let ok = out.system.num_constraints() == 0 || profile.is_3sat_k(5);
            Ok(Report {
                text: format!(
                    "variables {} clauses {}\nvariable degrees {}\nclause widths {}\nlambda round 1 {:.6} round 2 {:.6}\n3sat5 {}\n",
                    out.system.num_variables(),
                    out.system.num_constraints(),
                    histogram(&profile.left),
                    histogram(&profile.right),
                    out.lambdas[0],
                    out.lambdas[1],
                    if ok { "ok" } else { "FAIL" }
                ),
                ok,
            })
        }
        Command::TwoOrac { input, output } => {
            let (s, _) = read_system(input)?;
            let out = two_oracularize(&s)?;
            write_system(output, &out.system, None)?;
            let profile = degree_profile(&out.system);
            let ok = profile.left.keys().all(|&d| d == 9 || d == 10);
            Ok(Report {
                text: format!(
                    "variables {} ({} local copies) clauses {}\nvariable degrees {}\ncommuting pairs {}\n",
                    out.system.num_variables(),
                    out.locals.len(),
                    out.system.num_constraints(),
                    histogram(&profile.left),
                    gamereduce::reductions::commutation_pairs(&out.system).len()
                ),
                ok,
            })
        }
        Command::Dummy { input, j, r, game } => {
            let (s, _) = read_system(input)?;
            let d = DummyGame::new(&s, *j, *r, cap)?;
            let sm = d.smoothness();
            let mut text = format!(
                "coordinates {} left questions {}\nsmoothness {} max collision {} bound {}",
                d.len(),
                d.num_left(),
                if sm.holds() { "ok" } else { "FAIL" },
                format_rational(&sm.max_collision),
                format_rational(&sm.bound)
            );
            if let Some((q, a, b)) = sm.witness {
                let _ = write!(text, " at left {} labels {a},{b}", d.left_label(&d.left_question(q)));
            }
            let _ = writeln!(text, "\nmax fiber {} bound {}", d.max_preimage(), 4usize.pow(*r as u32));
            let fiber_ok = d.max_preimage() <= 4usize.pow(*r as u32);
            if let Some(path) = game {
                let (g, rights) = d.to_game()?;
                fs::write(path, write_nlg(&g))?;
                let _ = writeln!(text, "right questions {}\nquestions {} pairs {}", rights.len(), g.num_questions(), g.pairs().len());
            }
            Ok(Report {
                text,
                ok: sm.holds() && fiber_ok,
            })
        }
        Command::BuildSlc { input, output, j, r } => {
            let (s, _) = read_system(input)?;
            let (inst, prov) = build_slc(&s, *j, *r, cap)?;
            fs::write(output, write_slc(&inst))?;
            Ok(report(format!(
                "vertices {} edges {} labels {} right labels {} degree {}\nright questions {}\n",
                inst.num_vertices(),
                inst.num_edges(),
                inst.max_labels(),
                inst.right_labels(),
                inst.regular_degree().map_or("-".into(), |d| d.to_string()),
                prov.right.len()
            )))
        }
        Command::VerifySlc { input, j, r, seed, subsets } => {
            let inst = parse_slc(&read(input)?)?;
            let params = VerifyParams {
                seed: *seed,
                subsets: *subsets,
                ..VerifyParams::new(*j, *r)
            };
            let rep = verify_slc(&inst, &params);
            Ok(Report {
                text: rep.summary(),
                ok: rep.all_hold(),
            })
        }
        Command::Uniformize { input, output, n } => {
            let (s, pi) = read_system(input)?;
            let pi = or_uniform(&s, pi);
            let u = uniformize_by_repetition(&s, &pi, *n)?;
            write_system(output, &u.system, None)?;
            let size = u.system.num_constraints();
            let ok = n * n <= size && size <= n * n + n;
            Ok(Report {
                text: format!(
                    "constraints {size} (bounds {} .. {}) {}\ncounts {}\nmax |pi(i) - count/m'| {}\n",
                    n * n,
                    n * n + n,
                    if ok { "ok" } else { "FAIL" },
                    u.counts.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                    format_rational(&gamereduce::reductions::oracularize::uniformization_error(&pi, &u))
                ),
                ok,
            })
        }
        Command::Value { method } => value(method, cap),
        Command::Defect {
            system,
            strategy,
            dim,
            seed,
            tol,
        } => {
            let (s, pi) = read_system(system)?;
            let pi = or_uniform(&s, pi);
            let cv = match strategy {
                Some(path) => CvStrategy::from_game_strategy(&s, &parse_strategy(&read(path)?, *tol)?, *tol)?,
                None => CvStrategy::random(&s, *dim, &mut ChaCha8Rng::seed_from_u64(*seed)),
            };
            let d = defect_cv(&s, &pi, &cv)?;
            let def = defect_definitional(&s, &pi, &cv)?;
            let game = constraint_variable_game(&s, &pi)?;
            let v = strategy_value(&game, &cv.to_game_strategy(&s))?;
            let mut text = format!(
                "defect {:.12}\ndefinitional {:.12}\ndifference {:.3e}\nconstraint-variable value {:.12}\n",
                d.total,
                def,
                (d.total - def).abs(),
                v
            );
            for (i, c) in d.per_constraint.iter().enumerate() {
                let _ = writeln!(text, "constraint {} {:.12}", s.constraint(i).name, c);
            }
            Ok(Report {
                text,
                ok: (d.total - def).abs() <= 1e-9,
            })
        }
        Command::Round { input, output } => {
            let (dim, families) = parse_operator_families(&read(input)?)?;
            let mut pvms = Vec::with_capacity(families.len());
            let mut text = String::new();
            let mut ok = true;
            for (q, f) in families.iter().enumerate() {
                let r = round_povm_to_pvm(f)?;
                // optimal for two outcomes, so it can only gain
                if f.len() <= 2 && r.gain() < -1e-9 {
                    ok = false;
                }
                let _ = writeln!(
                    text,
                    "question {q} outcomes {} overlap {:.12} input {:.12} gain {:.3e}",
                    f.len(),
                    r.overlap,
                    r.povm_self_overlap,
                    r.gain()
                );
                pvms.push(r.pvm);
            }
            let strat = FiniteDimStrategy::new(dim, pvms, 1e-8)?;
            fs::write(output, write_strategy(&strat))?;
            Ok(Report { text, ok })
        }
        Command::Clm { op } => clm_op(op),
    }
}

fn value(method: &ValueMethod, cap: u128) -> Result<Report> {
    let joined = |a: &[usize]| a.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    match method {
        ValueMethod::Exact { input } => {
            let text = read(input)?;
            let r = if text.trim_start().starts_with("nlg") {
                classical_value_exact(&parse_nlg(&text)?, cap)?
            } else {
                let (s, pi) = parse_system(&text)?;
                let pi = or_uniform(&s, pi);
                system_value_exact(&s, &pi, cap)?
            };
            Ok(report(format!("value {}\nassignment {}\n", format_rational(&r.value), joined(&r.assignment))))
        }
        ValueMethod::Search { input, seed, iters } => {
            let g = read_game(input)?;
            let r = classical_value_search(&g, *seed, *iters, None)?;
            Ok(report(format!("value {}\nassignment {}\n", format_rational(&r.value), joined(&r.assignment))))
        }
        ValueMethod::Seesaw {
            input,
            dim,
            seed,
            iters,
            strategy,
        } => {
            let g = read_game(input)?;
            let classical = classical_value_search(&g, *seed, *iters, None)?;
            let counts: Vec<usize> = g.questions().iter().map(|q| q.answers).collect();
            let warm = FiniteDimStrategy::deterministic(&classical.assignment, &counts);
            let r = seesaw_lower_bound(&g, *dim, *seed, *iters, &[warm])?;
            if let Some(path) = strategy {
                fs::write(path, write_strategy(&r.strategy))?;
            }
            let orac = gamereduce::values::game_oracularizability(&g, &r.strategy, 1e-9)?;
            Ok(report(format!(
                "value {:.12}\nclassical lower bound {}\nmax commutator {:.3e}\n",
                r.value,
                format_rational(&classical.value),
                orac.max_commutator
            )))
        }
    }
}

fn read_clm(path: &Path) -> Result<(Clf, Clf)> {
    let mut ls = parse_clf(&read(path)?)?;
    let a = ls.remove(0);
    let b = if ls.is_empty() { a.clone() } else { ls.remove(0) };
    if a.space() != b.space() {
        return Err(Error::Shape("the two blocks act on different spaces".into()));
    }
    Ok((a, b))
}

fn parse_vector(text: &str, n: usize) -> Result<Vec<u32>> {
    let v: Vec<u32> = text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Malformed(format!("bad coordinate {t:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Shape(format!("expected {n} coordinates")));
    }
    Ok(v)
}

fn show(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn show_typed(t: &TypedClm, q: clm::TypedQuestion) -> String {
    format!("{}:{}", t.types()[q.ty], show(&t.vector(q.x)))
}

fn clm_op(op: &ClmOp) -> Result<Report> {
    match op {
        ClmOp::Pmf { input, x, y } => {
            let (la, lb) = read_clm(input)?;
            let n = la.space().dim();
            match (x, y) {
                (Some(x), Some(y)) => {
                    let p = clm::clm_pmf(&la, &lb, &parse_vector(x, n)?, &parse_vector(y, n)?)?;
                    Ok(report(format!("{}\n", format_rational(&p))))
                }
                (None, None) => {
                    let mut text = String::new();
                    for (x, y, p) in clm::clm_support(&la, &lb)? {
                        let _ = writeln!(text, "{} {} {}", show(&x), show(&y), format_rational(&p));
                    }
                    Ok(report(text))
                }
                _ => Err(Error::Malformed("give both --x and --y, or neither".into())),
            }
        }
        ClmOp::Pad { input, check_marginals } => {
            let (la, lb) = read_clm(input)?;
            let typed = oracularize_clm(&la, &lb)?;
            let p = pad(&typed);
            let mut text = format!(
                "ordered type pairs {}\nuniform marginal {}\n",
                typed.e_arrow_count(),
                format_rational(&p.uniform_marginal())
            );
            for q in typed.support_a()? {
                let _ = writeln!(text, "N^A {} = {}", show_typed(&typed, q), p.n_a(q)?);
            }
            for q in typed.support_b()? {
                let _ = writeln!(text, "N^B {} = {}", show_typed(&typed, q), p.n_b(q)?);
            }
            let mut ok = true;
            if *check_marginals {
                let r = p.check_marginals()?;
                ok = r.uniform();
                let _ = writeln!(
                    text,
                    "marginals {} ({} left, {} right padded questions)",
                    if ok { "uniform" } else { "FAIL" },
                    r.left_checked,
                    r.right_checked
                );
                if let Some((left, q, value)) = &r.witness {
                    let side = if *left { "left" } else { "right" };
                    let _ = writeln!(text, "witness {side} {} has {}", show_typed(&typed, q.question), format_rational(value));
                }
            }
            Ok(Report { text, ok })
        }
        ClmOp::Sample { input, seed, count } => {
            let (la, lb) = read_clm(input)?;
            let typed = oracularize_clm(&la, &lb)?;
            let p = pad(&typed);
            let mut text = String::new();
            for (a, b) in sample_padded(&p, *seed, *count)? {
                let _ = writeln!(
                    text,
                    "{}#{} {}#{}",
                    show_typed(&typed, a.question),
                    a.pad,
                    show_typed(&typed, b.question),
                    b.pad
                );
            }
            Ok(report(text))
        }
        ClmOp::Transport { input, seed, trials } => {
            let (la, lb) = read_clm(input)?;
            let typed = oracularize_clm(&la, &lb)?;
            // answers must agree in parity with the questions
            let game = TypedGame::new(typed, vec![2; 3], vec![2; 3], |q, r, a, b| {
                ((a ^ b) as u64) == ((q.x ^ r.x) & 1)
            })?;
            let padded = pad_verifier(&game)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut ok = true;
            let mut text = String::new();
            for t in 0..*trials {
                let c = game.random_correlation(&mut rng, 9);
                let v: Rational = game.value(&c)?;
                let lifted = padded.value(&padded.lift(&c)?)?;
                let d = padded.random_correlation(&mut rng, 9);
                let w = padded.value(&d)?;
                let projected = game.value(&padded.project(&d)?)?;
                let same = v == lifted && w == projected;
                ok &= same;
                let _ = writeln!(
                    text,
                    "trial {t} lift {} -> {} project {} -> {} {}",
                    format_rational(&v),
                    format_rational(&lifted),
                    format_rational(&w),
                    format_rational(&projected),
                    if same { "ok" } else { "FAIL" }
                );
            }
            Ok(Report { text, ok })
        }
    }
}
