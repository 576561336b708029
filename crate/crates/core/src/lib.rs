//! Exact arithmetic for the Lie rings `L_{i,m}(γ)` built from the p-adic
//! cyclotomic ring `Z_p[θ]`, together with the invariant `λ(γ)`.

pub mod eigen;
pub mod error;
pub mod hom;
pub mod howell;
pub mod jacobi;
pub mod lie;
pub mod padic;
pub mod sample;
pub mod survey;
pub mod verify;

pub use eigen::{crosscheck, f_g, fg_constants, Crosscheck, FgConstants, WeightCtx, FG};
pub use error::{Error, Result};
pub use hom::{theta_a_eval, CoeffTable, GammaFile, HomGamma, Surjectivity, WindowImages};
pub use howell::HowellForm;
pub use jacobi::{j_table, j_value, jacobi_value, lambda, y_one_param, JTable, LambdaReport};
pub use lie::{CentralSeries, JacobiCheck, LElem, LieRingPresentation};
pub use padic::{ElementLiteral, KElem, KappaDigits, PrimeCtx, Valuation, Zmod};
pub use sample::{random_element, random_unit, rng_from_seed, GammaSampler};
pub use survey::{emit_table, survey, Format, SurveyRow, SurveyTask, TableKind};
pub use verify::{verify, Suite, VerifyReport};
