use crate::interp::{run_instrumented, run_test, ExecOptions, ObservedValue, TestStatus};
use crate::program::Program;
use crate::syntax::*;

use super::edit::strip_assertions;

/// Why assertion generation gave up on a test.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Discarded {
    #[error("instrumented run exceeded the step budget")]
    Budget,
    #[error("instrumented run failed: {0}")]
    Failed(String),
    #[error("generated test does not pass: {0}")]
    Unstable(String),
}

/// The value has no literal form.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` cannot be written as a literal")]
pub struct Unserializable(pub String);

pub fn serialize_expected(value: &ObservedValue) -> Result<Expr, Unserializable> {
    Ok(Expr::new(match value {
        ObservedValue::Int(v) => ExprKind::Int(*v),
        ObservedValue::Bool(b) => ExprKind::Bool(*b),
        ObservedValue::Str(s) => ExprKind::Str(s.clone()),
        ObservedValue::Null => ExprKind::Null,
        other => return Err(Unserializable(other.to_string())),
    }))
}

fn assertion(subject: &str, getter: &str, expected: Expr) -> Stmt {
    let actual = Expr::call(Some(Expr::var(subject)), getter, vec![]);
    let call = match expected.kind {
        ExprKind::Bool(true) => Expr::call(None, ASSERT_TRUE, vec![actual]),
        ExprKind::Bool(false) => Expr::call(None, ASSERT_FALSE, vec![actual]),
        _ => Expr::call(None, ASSERT_EQ, vec![expected, actual]),
    };
    Stmt::new(StmtKind::Expr(call))
}

/// Replaces the assertions of `test` by ones derived from the values its
/// objects' getters return at the end of the test. A test that throws
/// instead gets the throwing statement wrapped in `assert_throws` and loses
/// the statements after it.
pub fn generate_assertions(test: &TestMethod, program: &Program, opts: ExecOptions) -> Result<TestMethod, Discarded> {
    let base = strip_assertions(&test.decl);
    let mut instrumented = base.clone();
    instrumented.body.push(Stmt::new(StmtKind::Expr(Expr::call(None, OBSERVE, vec![]))));
    instrumented.renumber();
    let outcome = run_instrumented(program, &instrumented, opts);

    let mut decl = base.clone();
    let mut added = Vec::new();
    match (&outcome.status, outcome.thrown_at) {
        (TestStatus::Pass, _) => {
            for obs in &outcome.observations {
                if let Ok(expected) = serialize_expected(&obs.value) {
                    decl.body.push(assertion(&obs.subject, &obs.getter, expected));
                    added.push((decl.body.len() - 1, ModificationKind::AssertionAdded, format!("observed {}.{}() == {}", obs.subject, obs.getter, obs.value)));
                }
            }
        }
        (TestStatus::RuntimeError { message, .. }, Some(i)) if i < base.body.len() => {
            decl.body.truncate(i);
            let thrower = base.body[i].clone();
            decl.body.push(Stmt::new(StmtKind::AssertThrows { message: message.clone(), body: vec![thrower] }));
            added.push((i, ModificationKind::ExceptionWrapped, format!("expects exception {}", quote(message))));
        }
        (TestStatus::StepBudgetExceeded, _) => return Err(Discarded::Budget),
        (status, _) => return Err(Discarded::Failed(status.kind().into())),
    }
    decl.renumber();

    let mut ledger: Vec<Modification> =
        test.ledger().iter().filter(|m| m.kind != ModificationKind::AssertionAdded).cloned().collect();
    ledger.extend(added.into_iter().map(|(i, kind, detail)| Modification { kind, target: decl.body[i].meta.id, detail }));

    let rerun = run_test(program, &decl, opts);
    if !rerun.status.is_pass() {
        return Err(Discarded::Unstable(rerun.status.kind().into()));
    }
    let origin = Origin::Amplified { parent: test.root_name().to_string(), ledger };
    Ok(TestMethod { decl, origin })
}
