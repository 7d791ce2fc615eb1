//! C ABI for the acumen meta-evaluation engine.
//!
//! Every fallible function returns an [`AcumenStatus`]; on failure a
//! thread-local message is stored and can be read back with
//! [`acumen_last_error_message`]. Objects returned through out-pointers are
//! heap-allocated and owned by the caller, who must release them with the
//! matching `acumen_*_free` function. The generated header lives at
//! `include/acumen.h`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use acumen::acu;
use acumen::corpus::{self, Corpus, LoadOptions, ScoreMatrix};
use acumen::correlate::{leveled_corr, CorrError, CorrKind, CorrLevel};
use acumen::lexmetrics::{bleu, chrf, rouge_with, RougeVariant};
use acumen::resample::{
    krippendorff_alpha, paired_bootstrap_test, power_analysis, ResampleConfig, ResampleError,
    Scale,
};

/// Result of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcumenStatus {
    /// The call succeeded and all out-parameters are filled in.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Reading or parsing input data failed.
    LoadFailed = 3,
    /// The computation itself failed; see the error message.
    ComputeFailed = 4,
    /// The statistic is undefined for this input (zero variance).
    Degenerate = 5,
    /// A scalar argument was out of range or an index out of bounds.
    BadArgument = 6,
    /// An internal invariant was violated; the library state is still sound.
    Panicked = 7,
}

/// Correlation coefficient selector for [`acumen_correlation`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcumenCorrKind {
    Pearson = 0,
    Spearman = 1,
    Kendall = 2,
}

/// Aggregation level selector for [`acumen_correlation`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcumenCorrLevel {
    System = 0,
    Summary = 1,
}

/// Overlap variant selector for [`acumen_rouge`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcumenRougeVariant {
    Rouge1 = 0,
    Rouge2 = 1,
    RougeL = 2,
}

/// Distance scale selector for [`acumen_krippendorff`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcumenScale {
    Nominal = 0,
    Interval = 1,
}

/// An annotated benchmark loaded into memory. Opaque; create with
/// [`acumen_corpus_load`] and release with [`acumen_corpus_free`].
pub struct AcumenCorpus {
    inner: Corpus,
}

/// A dense example-by-system score grid. Opaque; release with
/// [`acumen_matrix_free`].
pub struct AcumenMatrix {
    inner: ScoreMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl std::fmt::Display) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
}

/// Runs an FFI body, converting any panic into [`AcumenStatus::Panicked`]
/// so unwinding never crosses the C boundary.
fn guard<F: FnOnce() -> AcumenStatus>(body: F) -> AcumenStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .copied()
                .or_else(|| payload.downcast_ref::<String>().map(String::as_str))
                .unwrap_or("unknown panic payload");
            set_error(format!("internal panic: {what}"));
            AcumenStatus::Panicked
        }
    }
}

macro_rules! require_non_null {
    ($($ptr:expr),+ $(,)?) => {
        $(
            if $ptr.is_null() {
                set_error(concat!(stringify!($ptr), " must not be null"));
                return AcumenStatus::NullArgument;
            }
        )+
    };
}

macro_rules! try_status {
    ($expr:expr) => {
        match $expr {
            Ok(value) => value,
            Err(status) => return status,
        }
    };
}

/// # Safety
/// `ptr` must be non-null and point to a NUL-terminated string.
unsafe fn utf8_arg<'a>(name: &str, ptr: *const c_char) -> Result<&'a str, AcumenStatus> {
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        AcumenStatus::InvalidUtf8
    })
}

fn corr_kind_arg(kind: c_int) -> Result<CorrKind, AcumenStatus> {
    match kind {
        0 => Ok(CorrKind::Pearson),
        1 => Ok(CorrKind::Spearman),
        2 => Ok(CorrKind::Kendall),
        other => {
            set_error(format!(
                "unknown correlation kind {other} (expected 0=pearson, 1=spearman, 2=kendall)"
            ));
            Err(AcumenStatus::BadArgument)
        }
    }
}

fn corr_level_arg(level: c_int) -> Result<CorrLevel, AcumenStatus> {
    match level {
        0 => Ok(CorrLevel::System),
        1 => Ok(CorrLevel::Summary),
        other => {
            set_error(format!(
                "unknown correlation level {other} (expected 0=system, 1=summary)"
            ));
            Err(AcumenStatus::BadArgument)
        }
    }
}

fn rouge_variant_arg(variant: c_int) -> Result<RougeVariant, AcumenStatus> {
    match variant {
        0 => Ok(RougeVariant::R1),
        1 => Ok(RougeVariant::R2),
        2 => Ok(RougeVariant::RL),
        other => {
            set_error(format!(
                "unknown rouge variant {other} (expected 0=rouge1, 1=rouge2, 2=rougeL)"
            ));
            Err(AcumenStatus::BadArgument)
        }
    }
}

fn scale_arg(scale: c_int) -> Result<Scale, AcumenStatus> {
    match scale {
        0 => Ok(Scale::Nominal),
        1 => Ok(Scale::Interval),
        other => {
            set_error(format!(
                "unknown scale {other} (expected 0=nominal, 1=interval)"
            ));
            Err(AcumenStatus::BadArgument)
        }
    }
}

fn resample_status(err: &ResampleError) -> AcumenStatus {
    match err {
        ResampleError::LengthMismatch { .. } | ResampleError::InvalidConfig(_) => {
            AcumenStatus::BadArgument
        }
        ResampleError::Degenerate => AcumenStatus::Degenerate,
        _ => AcumenStatus::ComputeFailed,
    }
}

fn corr_status(err: &CorrError) -> AcumenStatus {
    match err {
        CorrError::LengthMismatch { .. }
        | CorrError::ShapeMismatch(_)
        | CorrError::TooManyBuckets { .. }
        | CorrError::UnknownSystem(_) => AcumenStatus::BadArgument,
        CorrError::Degenerate | CorrError::AllRowsDegenerate => AcumenStatus::Degenerate,
        CorrError::EmptyBucket => AcumenStatus::ComputeFailed,
    }
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn acumen_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread, or an
/// empty string if none occurred. The pointer stays valid until the next
/// call into the library from the same thread. Do not free.
#[no_mangle]
pub extern "C" fn acumen_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned through an out-parameter of this library.
/// Passing null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acumen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a benchmark directory: `examples.jsonl` plus whichever of
/// `outputs.jsonl`, `acu_annotations.jsonl`, `likert_annotations.jsonl`,
/// and the CSV matrices under `metrics/` are present. On success writes an
/// owned handle to `out_corpus`; release it with [`acumen_corpus_free`].
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out_corpus` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acumen_corpus_load(
    dir: *const c_char,
    out_corpus: *mut *mut AcumenCorpus,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(dir, out_corpus);
        let dir = Path::new(try_status!(utf8_arg("dir", dir)));
        let paths = match corpus::benchmark_dir_paths(dir) {
            Ok(paths) => paths,
            Err(err) => {
                set_error(format!("cannot scan {}: {err}", dir.display()));
                return AcumenStatus::LoadFailed;
            }
        };
        match corpus::load_benchmark(&paths, &LoadOptions::default()) {
            Ok((inner, _report)) => {
                *out_corpus = Box::into_raw(Box::new(AcumenCorpus { inner }));
                AcumenStatus::Ok
            }
            Err(err) => {
                set_error(err);
                AcumenStatus::LoadFailed
            }
        }
    })
}

/// Releases a corpus handle. Passing null is a no-op.
///
/// # Safety
/// `corpus` must be null or an unfreed handle from [`acumen_corpus_load`].
#[no_mangle]
pub unsafe extern "C" fn acumen_corpus_free(corpus: *mut AcumenCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Writes the number of examples and the number of distinct systems with
/// outputs in the corpus.
///
/// # Safety
/// All pointers must be valid; `corpus` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_corpus_counts(
    corpus: *const AcumenCorpus,
    out_examples: *mut usize,
    out_systems: *mut usize,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(corpus, out_examples, out_systems);
        let corpus = &(*corpus).inner;
        *out_examples = corpus.examples().len();
        *out_systems = corpus.system_names().len();
        AcumenStatus::Ok
    })
}

fn acu_matrix(
    corpus: *const AcumenCorpus,
    alpha: Option<f64>,
    out_matrix: *mut *mut AcumenMatrix,
) -> AcumenStatus {
    let corpus = unsafe { &(*corpus).inner };
    match acu::score_matrix(corpus, alpha) {
        Ok(inner) => {
            unsafe { *out_matrix = Box::into_raw(Box::new(AcumenMatrix { inner })) };
            AcumenStatus::Ok
        }
        Err(err) => {
            set_error(err);
            AcumenStatus::ComputeFailed
        }
    }
}

/// Computes the matched-fraction score grid from the corpus's unit-match
/// annotations, without length normalization. On success writes an owned
/// handle to `out_matrix`; release it with [`acumen_matrix_free`].
///
/// # Safety
/// All pointers must be valid; `corpus` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_acu_scores_raw(
    corpus: *const AcumenCorpus,
    out_matrix: *mut *mut AcumenMatrix,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(corpus, out_matrix);
        acu_matrix(corpus, None, out_matrix)
    })
}

/// Computes the length-normalized score grid with the given normalization
/// strength `alpha` (must be positive). On success writes an owned handle
/// to `out_matrix`; release it with [`acumen_matrix_free`].
///
/// # Safety
/// All pointers must be valid; `corpus` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_acu_scores_normalized(
    corpus: *const AcumenCorpus,
    alpha: f64,
    out_matrix: *mut *mut AcumenMatrix,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(corpus, out_matrix);
        if alpha.is_nan() || alpha <= 0.0 {
            set_error(format!("alpha must be positive, got {alpha}"));
            return AcumenStatus::BadArgument;
        }
        acu_matrix(corpus, Some(alpha), out_matrix)
    })
}

/// Grid-searches the normalization strength that minimizes the absolute
/// correlation between normalized scores and summary lengths, using the
/// default grid. Writes the chosen strength to `out_alpha` and the residual
/// correlation to `out_residual`.
///
/// # Safety
/// All pointers must be valid; `corpus` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_calibrate_alpha(
    corpus: *const AcumenCorpus,
    out_alpha: *mut f64,
    out_residual: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(corpus, out_alpha, out_residual);
        let corpus = &(*corpus).inner;
        match acu::calibrate_alpha(corpus, &acu::default_alpha_grid()) {
            Ok(result) => {
                *out_alpha = result.alpha;
                *out_residual = result.residual_correlation;
                AcumenStatus::Ok
            }
            Err(err) => {
                set_error(err);
                AcumenStatus::ComputeFailed
            }
        }
    })
}

/// Reads a score matrix from CSV (`example_id` column then one column per
/// system; `#` lines are comments). On success writes an owned handle to
/// `out_matrix`; release it with [`acumen_matrix_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_matrix` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_read_csv(
    path: *const c_char,
    out_matrix: *mut *mut AcumenMatrix,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(path, out_matrix);
        let path = Path::new(try_status!(utf8_arg("path", path)));
        match corpus::read_matrix_csv(path) {
            Ok(inner) => {
                *out_matrix = Box::into_raw(Box::new(AcumenMatrix { inner }));
                AcumenStatus::Ok
            }
            Err(err) => {
                set_error(err);
                AcumenStatus::LoadFailed
            }
        }
    })
}

/// Writes a score matrix to CSV in the same format read by
/// [`acumen_matrix_read_csv`].
///
/// # Safety
/// `matrix` must be an unfreed handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_write_csv(
    matrix: *const AcumenMatrix,
    path: *const c_char,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(matrix, path);
        let path = Path::new(try_status!(utf8_arg("path", path)));
        match corpus::write_matrix_csv(path, &(*matrix).inner, &[]) {
            Ok(()) => AcumenStatus::Ok,
            Err(err) => {
                set_error(err);
                AcumenStatus::ComputeFailed
            }
        }
    })
}

/// Releases a matrix handle. Passing null is a no-op.
///
/// # Safety
/// `matrix` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_free(matrix: *mut AcumenMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Writes the matrix dimensions: number of example rows and system columns.
///
/// # Safety
/// All pointers must be valid; `matrix` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_shape(
    matrix: *const AcumenMatrix,
    out_examples: *mut usize,
    out_systems: *mut usize,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(matrix, out_examples, out_systems);
        let matrix = &(*matrix).inner;
        *out_examples = matrix.n_examples();
        *out_systems = matrix.n_systems();
        AcumenStatus::Ok
    })
}

/// Writes the score at (`row`, `col`) to `out_value`. Out-of-bounds indices
/// yield `BadArgument`.
///
/// # Safety
/// All pointers must be valid; `matrix` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_get(
    matrix: *const AcumenMatrix,
    row: usize,
    col: usize,
    out_value: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(matrix, out_value);
        let matrix = &(*matrix).inner;
        if row >= matrix.n_examples() || col >= matrix.n_systems() {
            set_error(format!(
                "index ({row}, {col}) out of bounds for a {}x{} matrix",
                matrix.n_examples(),
                matrix.n_systems()
            ));
            return AcumenStatus::BadArgument;
        }
        *out_value = matrix.get(row, col);
        AcumenStatus::Ok
    })
}

/// Copies all scores row-major into `buffer`, which must hold exactly
/// `rows * cols` doubles as reported by [`acumen_matrix_shape`].
///
/// # Safety
/// `buffer` must point to `len` writable doubles; `matrix` must be an
/// unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_copy_values(
    matrix: *const AcumenMatrix,
    buffer: *mut f64,
    len: usize,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(matrix, buffer);
        let matrix = &(*matrix).inner;
        let expected = matrix.n_examples() * matrix.n_systems();
        if len != expected {
            set_error(format!("buffer holds {len} values, matrix has {expected}"));
            return AcumenStatus::BadArgument;
        }
        let out = std::slice::from_raw_parts_mut(buffer, len);
        for (i, row) in matrix.rows().enumerate() {
            let cols = matrix.n_systems();
            out[i * cols..(i + 1) * cols].copy_from_slice(row);
        }
        AcumenStatus::Ok
    })
}

fn matrix_label(
    matrix: *const AcumenMatrix,
    index: usize,
    out: *mut *mut c_char,
    pick: impl Fn(&ScoreMatrix) -> &[String],
    what: &str,
) -> AcumenStatus {
    let matrix = unsafe { &(*matrix).inner };
    let labels = pick(matrix);
    let Some(label) = labels.get(index) else {
        set_error(format!(
            "{what} index {index} out of bounds ({} available)",
            labels.len()
        ));
        return AcumenStatus::BadArgument;
    };
    match CString::new(label.as_str()) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            AcumenStatus::Ok
        }
        Err(_) => {
            set_error(format!("{what} '{label}' contains a NUL byte"));
            AcumenStatus::ComputeFailed
        }
    }
}

/// Writes a copy of the system name for column `index` to `out_name`.
/// Release the copy with [`acumen_string_free`].
///
/// # Safety
/// All pointers must be valid; `matrix` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_system_name(
    matrix: *const AcumenMatrix,
    index: usize,
    out_name: *mut *mut c_char,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(matrix, out_name);
        matrix_label(matrix, index, out_name, ScoreMatrix::systems, "system")
    })
}

/// Writes a copy of the example id for row `index` to `out_id`. Release the
/// copy with [`acumen_string_free`].
///
/// # Safety
/// All pointers must be valid; `matrix` must be an unfreed handle.
#[no_mangle]
pub unsafe extern "C" fn acumen_matrix_example_id(
    matrix: *const AcumenMatrix,
    index: usize,
    out_id: *mut *mut c_char,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(matrix, out_id);
        matrix_label(matrix, index, out_id, ScoreMatrix::example_ids, "example")
    })
}

/// Correlates two aligned score matrices. `kind` is an [`AcumenCorrKind`]
/// value and `level` an [`AcumenCorrLevel`] value. A statistic that is
/// undefined for the data (zero variance everywhere) yields `Degenerate`
/// and writes NaN.
///
/// # Safety
/// All pointers must be valid; both matrices must be unfreed handles.
#[no_mangle]
pub unsafe extern "C" fn acumen_correlation(
    x: *const AcumenMatrix,
    y: *const AcumenMatrix,
    kind: c_int,
    level: c_int,
    out_value: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(x, y, out_value);
        let kind = try_status!(corr_kind_arg(kind));
        let level = try_status!(corr_level_arg(level));
        match leveled_corr(&(*x).inner, &(*y).inner, kind, level) {
            Ok(Some(value)) => {
                *out_value = value;
                AcumenStatus::Ok
            }
            Ok(None) => {
                *out_value = f64::NAN;
                set_error("correlation undefined: zero variance");
                AcumenStatus::Degenerate
            }
            Err(err) => {
                let status = corr_status(&err);
                set_error(err);
                status
            }
        }
    })
}

/// Scores `candidate` against `reference` with the selected overlap
/// variant (an [`AcumenRougeVariant`] value); `stem` applies light suffix
/// stripping first. Writes recall, precision, and F1.
///
/// # Safety
/// Strings must be NUL-terminated; out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn acumen_rouge(
    reference: *const c_char,
    candidate: *const c_char,
    variant: c_int,
    stem: bool,
    out_recall: *mut f64,
    out_precision: *mut f64,
    out_f1: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(reference, candidate, out_recall, out_precision, out_f1);
        let variant = try_status!(rouge_variant_arg(variant));
        let reference = try_status!(utf8_arg("reference", reference));
        let candidate = try_status!(utf8_arg("candidate", candidate));
        let score = rouge_with(reference, candidate, variant, stem);
        *out_recall = score.recall.unwrap_or(f64::NAN);
        *out_precision = score.precision.unwrap_or(f64::NAN);
        *out_f1 = score.f1;
        AcumenStatus::Ok
    })
}

/// Scores `candidate` against `reference` with character n-gram F-score.
///
/// # Safety
/// Strings must be NUL-terminated; `out_score` must be valid.
#[no_mangle]
pub unsafe extern "C" fn acumen_chrf(
    reference: *const c_char,
    candidate: *const c_char,
    out_score: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(reference, candidate, out_score);
        let reference = try_status!(utf8_arg("reference", reference));
        let candidate = try_status!(utf8_arg("candidate", candidate));
        *out_score = chrf(reference, candidate);
        AcumenStatus::Ok
    })
}

/// Scores `candidate` against `reference` with smoothed sentence-level
/// n-gram precision and a brevity penalty.
///
/// # Safety
/// Strings must be NUL-terminated; `out_score` must be valid.
#[no_mangle]
pub unsafe extern "C" fn acumen_bleu(
    reference: *const c_char,
    candidate: *const c_char,
    out_score: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(reference, candidate, out_score);
        let reference = try_status!(utf8_arg("reference", reference));
        let candidate = try_status!(utf8_arg("candidate", candidate));
        *out_score = bleu(&[reference], candidate);
        AcumenStatus::Ok
    })
}

/// Applies the length penalty to a matched fraction `f`: summaries no
/// longer than the reference keep their score, longer ones decay
/// exponentially at a rate set by `alpha`. `cand_len` and `ref_len` are
/// word counts; `ref_len` must be positive and `alpha` must be positive.
///
/// # Safety
/// `out_score` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acumen_normalized_score(
    f: f64,
    cand_len: usize,
    ref_len: usize,
    alpha: f64,
    out_score: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(out_score);
        match acu::normalized_acu_score(f, cand_len, ref_len, alpha) {
            Ok(score) => {
                *out_score = score;
                AcumenStatus::Ok
            }
            Err(err) => {
                set_error(err);
                AcumenStatus::BadArgument
            }
        }
    })
}

/// # Safety
/// Both pointers must address `len` readable doubles.
unsafe fn paired_slices<'a>(
    a: *const f64,
    b: *const f64,
    len: usize,
) -> (&'a [f64], &'a [f64]) {
    (
        std::slice::from_raw_parts(a, len),
        std::slice::from_raw_parts(b, len),
    )
}

/// Runs the paired bootstrap test for mean(a) > mean(b) on two aligned
/// score vectors of length `len` (at least 2) and writes the one-sided
/// probability that the advantage disappears under resampling.
///
/// # Safety
/// `a` and `b` must address `len` readable doubles; `out_p_value` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn acumen_paired_bootstrap(
    a: *const f64,
    b: *const f64,
    len: usize,
    seed: u64,
    resamples: usize,
    out_p_value: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(a, b, out_p_value);
        let (a, b) = paired_slices(a, b, len);
        let cfg = ResampleConfig {
            seed,
            resamples,
            ..ResampleConfig::default()
        };
        match paired_bootstrap_test(a, b, &cfg) {
            Ok(p) => {
                *out_p_value = p;
                AcumenStatus::Ok
            }
            Err(err) => {
                let status = resample_status(&err);
                set_error(err);
                status
            }
        }
    })
}

/// Estimates the probability of detecting the observed difference between
/// `a` and `b` when experiments draw `sample_size` paired examples: runs
/// `trials` simulated experiments, each tested with `resamples` bootstrap
/// draws at significance `alpha_level`, and writes the detection rate.
///
/// # Safety
/// `a` and `b` must address `len` readable doubles; `out_power` must be
/// valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn acumen_power(
    a: *const f64,
    b: *const f64,
    len: usize,
    seed: u64,
    trials: usize,
    resamples: usize,
    alpha_level: f64,
    sample_size: usize,
    out_power: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(a, b, out_power);
        let (a, b) = paired_slices(a, b, len);
        let cfg = ResampleConfig {
            seed,
            trials,
            resamples,
            alpha_level,
            sample_size,
        };
        match power_analysis(a, b, &cfg) {
            Ok(result) => {
                *out_power = result.power;
                AcumenStatus::Ok
            }
            Err(err) => {
                let status = resample_status(&err);
                set_error(err);
                status
            }
        }
    })
}

/// Computes Krippendorff's agreement coefficient over rating units passed
/// in flattened form: `values` holds all ratings back to back and
/// `unit_sizes[i]` says how many of them belong to unit `i`. `scale` is an
/// [`AcumenScale`] value.
///
/// # Safety
/// `values` must address the sum of `unit_sizes` readable doubles and
/// `unit_sizes` must address `n_units` readable entries; both may be null
/// only when `n_units` is 0. `out_alpha` must be valid.
#[no_mangle]
pub unsafe extern "C" fn acumen_krippendorff(
    values: *const f64,
    unit_sizes: *const usize,
    n_units: usize,
    scale: c_int,
    out_alpha: *mut f64,
) -> AcumenStatus {
    guard(|| {
        require_non_null!(out_alpha);
        let scale = try_status!(scale_arg(scale));
        let mut units = Vec::with_capacity(n_units);
        if n_units > 0 {
            require_non_null!(values, unit_sizes);
            let sizes = std::slice::from_raw_parts(unit_sizes, n_units);
            let total = match sizes.iter().try_fold(0usize, |acc, &n| acc.checked_add(n)) {
                Some(total) => total,
                None => {
                    set_error("unit sizes overflow the address space");
                    return AcumenStatus::BadArgument;
                }
            };
            let flat = std::slice::from_raw_parts(values, total);
            let mut offset = 0;
            for &size in sizes {
                units.push(flat[offset..offset + size].to_vec());
                offset += size;
            }
        }
        match krippendorff_alpha(&units, scale) {
            Ok(alpha) => {
                *out_alpha = alpha;
                AcumenStatus::Ok
            }
            Err(err) => {
                let status = resample_status(&err);
                set_error(err);
                status
            }
        }
    })
}
