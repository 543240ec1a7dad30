//! C ABI over `polarcc`.
//!
//! Codes and decoders are opaque heap handles created by `*_new`/`*_construct`
//! functions and released by the matching `*_free`. Every fallible call
//! returns a [`PolarccStatus`]; on failure a message is kept per thread and
//! can be fetched with [`polarcc_last_error`]. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use polarcc::code::{CodeMeta, CodeSpec};
use polarcc::construct::{Construction, MonteCarlo};
use polarcc::scd::{Decoder, Domain};
use polarcc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarccStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Parse = 3,
    Numerical = 4,
    State = 5,
    Io = 6,
    InvalidUtf8 = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarccMethod {
    Pcc0 = 0,
    Pcc1 = 1,
    Pcc2 = 2,
    Pcc3 = 3,
}

/// Parameters of the constructions that take any.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PolarccConstructOptions {
    /// Alphabet size of the transition-matrix construction.
    pub mu: u32,
    /// Monte-Carlo trials of the genie construction.
    pub mc_size: u64,
    pub seed: u64,
    pub threads: u32,
}

/// Opaque code handle.
pub struct PolarccCode {
    spec: CodeSpec,
}

/// Opaque decoder handle, reusable for any code of its length.
pub struct PolarccDecoder {
    dec: Decoder,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PolarccStatus {
    match e {
        Error::Domain(_) => PolarccStatus::Domain,
        Error::Parse { .. } => PolarccStatus::Parse,
        Error::Numerical(_) => PolarccStatus::Numerical,
        Error::State(_) => PolarccStatus::State,
        Error::Io(_) => PolarccStatus::Io,
    }
}

struct Failure(PolarccStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PolarccStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PolarccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PolarccStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PolarccStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(PolarccStatus::InvalidUtf8, "path is not UTF-8".into()))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_mut_arg<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn check_len(what: &str, got: usize, want: usize) -> Result<(), Failure> {
    if got != want {
        return Err(Failure(
            PolarccStatus::Domain,
            format!("{what} has length {got}, expected {want}"),
        ));
    }
    Ok(())
}

fn publish<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn polarcc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn polarcc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn polarcc_construct_options_default() -> PolarccConstructOptions {
    let mc = MonteCarlo::default();
    PolarccConstructOptions {
        mu: 64,
        mc_size: mc.trials,
        seed: mc.seed,
        threads: 1,
    }
}

/// Builds an `(n, k)` code with the given construction at `design_snr_db`.
/// `options` may be NULL for the defaults.
///
/// # Safety
/// `options` must be NULL or valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_construct(
    method: PolarccMethod,
    n: usize,
    k: usize,
    design_snr_db: f64,
    options: *const PolarccConstructOptions,
    out: *mut *mut PolarccCode,
) -> PolarccStatus {
    guard(|| {
        let o = if options.is_null() {
            polarcc_construct_options_default()
        } else {
            *options
        };
        let c = match method {
            PolarccMethod::Pcc0 => Construction::Pcc0,
            PolarccMethod::Pcc1 => Construction::Pcc1(MonteCarlo {
                trials: o.mc_size,
                seed: o.seed,
                threads: o.threads.max(1) as usize,
                ..MonteCarlo::default()
            }),
            PolarccMethod::Pcc2 => Construction::Pcc2 { mu: o.mu as usize },
            PolarccMethod::Pcc3 => Construction::Pcc3,
        };
        let spec = c.build(n, k, design_snr_db)?.code;
        publish(out, PolarccCode { spec })
    })
}

/// Code of length `n` with an explicit frozen set.
///
/// # Safety
/// `frozen` must point to `count` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_from_frozen(
    n: usize,
    frozen: *const usize,
    count: usize,
    out: *mut *mut PolarccCode,
) -> PolarccStatus {
    guard(|| {
        let f = slice_arg(frozen, count, "frozen")?;
        let spec = CodeSpec::new(n, f.iter().copied(), CodeMeta::external())?;
        publish(out, PolarccCode { spec })
    })
}

/// Reads a `.pcf` file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_read_pcf(
    path: *const c_char,
    out: *mut *mut PolarccCode,
) -> PolarccStatus {
    guard(|| {
        let path = path_arg(path)?;
        let f = File::open(path).map_err(Error::from)?;
        let spec = CodeSpec::read_pcf(BufReader::new(f))?;
        publish(out, PolarccCode { spec })
    })
}

/// Writes a `.pcf` file.
///
/// # Safety
/// `code` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_write_pcf(
    code: *const PolarccCode,
    path: *const c_char,
) -> PolarccStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        let path = path_arg(path)?;
        let f = File::create(path).map_err(Error::from)?;
        code.spec.write_pcf(f)?;
        Ok(())
    })
}

/// Block length, or 0 for NULL.
///
/// # Safety
/// `code` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_n(code: *const PolarccCode) -> usize {
    code.as_ref().map_or(0, |c| c.spec.n())
}

/// Information length, or 0 for NULL.
///
/// # Safety
/// `code` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_k(code: *const PolarccCode) -> usize {
    code.as_ref().map_or(0, |c| c.spec.k())
}

/// Copies the ascending frozen indices into `out[0..cap]`. `count` receives
/// `N - K` even when the buffer is too small.
///
/// # Safety
/// `code` must be a live handle, `out` writable for `cap` values, `count` valid.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_frozen(
    code: *const PolarccCode,
    out: *mut usize,
    cap: usize,
    count: *mut usize,
) -> PolarccStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        let f = code.spec.frozen();
        *count = f.len();
        if cap < f.len() {
            return Err(Failure(
                PolarccStatus::BufferTooSmall,
                format!("need {} slots, got {cap}", f.len()),
            ));
        }
        slice_mut_arg(out, f.len(), "out")?.copy_from_slice(f);
        Ok(())
    })
}

/// # Safety
/// `code` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polarcc_code_free(code: *mut PolarccCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Encodes `K` message bits (values 0/1) into `N` codeword bits.
///
/// # Safety
/// Buffers must be valid for their stated lengths.
#[no_mangle]
pub unsafe extern "C" fn polarcc_encode(
    code: *const PolarccCode,
    u: *const u8,
    u_len: usize,
    x: *mut u8,
    x_len: usize,
) -> PolarccStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        check_len("message", u_len, code.spec.k())?;
        check_len("codeword buffer", x_len, code.spec.n())?;
        let u = slice_arg(u, u_len, "u")?;
        let cw = polarcc::encoder::encode(&code.spec, u)?;
        slice_mut_arg(x, x_len, "x")?.copy_from_slice(&cw);
        Ok(())
    })
}

/// Successive-cancellation decoder for length `n`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn polarcc_decoder_new(
    n: usize,
    out: *mut *mut PolarccDecoder,
) -> PolarccStatus {
    guard(|| {
        publish(
            out,
            PolarccDecoder {
                dec: Decoder::new(n, Domain::Log)?,
            },
        )
    })
}

/// Decodes `N` channel LLRs (positive favours 0) into `K` message bits.
///
/// # Safety
/// Handles must be live and buffers valid for their stated lengths.
#[no_mangle]
pub unsafe extern "C" fn polarcc_decode(
    decoder: *mut PolarccDecoder,
    code: *const PolarccCode,
    llr: *const f64,
    llr_len: usize,
    u_hat: *mut u8,
    u_len: usize,
) -> PolarccStatus {
    guard(|| {
        let decoder = decoder.as_mut().ok_or_else(|| null("decoder"))?;
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        check_len("LLR input", llr_len, code.spec.n())?;
        check_len("message buffer", u_len, code.spec.k())?;
        let llr = slice_arg(llr, llr_len, "llr")?;
        let d = decoder.dec.decode_data(&code.spec, llr)?;
        let out = slice_mut_arg(u_hat, u_len, "u_hat")?;
        for (o, &i) in out.iter_mut().zip(code.spec.info()) {
            *o = d[i];
        }
        Ok(())
    })
}

/// # Safety
/// `decoder` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polarcc_decoder_free(decoder: *mut PolarccDecoder) {
    if !decoder.is_null() {
        drop(Box::from_raw(decoder));
    }
}
