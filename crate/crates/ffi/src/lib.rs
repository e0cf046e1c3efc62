//! C ABI for the dpefb server and user.
//!
//! Every fallible function returns a [`DpefbStatus`]. On failure a message is
//! kept per thread and can be read with [`dpefb_last_error`] until the next
//! failing call. Handles are opaque and must be released with their `_free`
//! function; passing NULL to a `_free` function is a no-op.
//!
//! Node ids are the dense `u32` ids of the tree file.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use dpefb::game_tree::play;
use dpefb::rng::{stream, user_stream, StreamRng};
use dpefb::server::compute_schedule;
use dpefb::user::LaplaceMechanism;
use dpefb::{Environment, Error, Game, NodeId, ReducedStrategy, ServerState, UserReport};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpefbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidTree = 4,
    InvalidArgument = 5,
    /// The output buffer is too small; the required length was written.
    BufferTooSmall = 6,
    /// `dpefb_server_update` was called without a pending sampled strategy.
    NoPendingStrategy = 7,
    Runtime = 8,
    Panic = 9,
}

/// A parsed, validated tree with its profiles.
pub struct DpefbGame {
    game: Arc<Game>,
}

/// Learner state plus its sampling stream.
pub struct DpefbServer {
    state: ServerState,
    rng: StreamRng,
    pending: Option<ReducedStrategy>,
}

/// The user side: a current environment and a private noise stream.
pub struct DpefbUser {
    game: Arc<Game>,
    mechanism: LaplaceMechanism,
    env: Option<Environment>,
    rng: StreamRng,
    trial: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> DpefbStatus {
    match e {
        Error::Parse { .. } | Error::LossOutOfRange { .. } | Error::NoRoot => DpefbStatus::Parse,
        Error::InvalidTree(_) | Error::CountOverflow(_) => DpefbStatus::InvalidTree,
        Error::EpsilonOutOfRange(_)
        | Error::HorizonTooShort(_)
        | Error::InvalidArgument(_)
        | Error::InvalidStrategy(_)
        | Error::StrategyUndefined(_)
        | Error::InvalidEnvironment(_)
        | Error::ReportDomain(_)
        | Error::NonFiniteReport(_) => DpefbStatus::InvalidArgument,
        _ => DpefbStatus::Runtime,
    }
}

struct Fail(DpefbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DpefbStatus::NullPointer, format!("{what} is NULL"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(DpefbStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DpefbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DpefbStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DpefbStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn node(game: &Game, id: u32) -> Result<NodeId, Fail> {
    if (id as usize) < game.tree.len() {
        Ok(NodeId(id))
    } else {
        Err(invalid(format!("node id {id} out of range")))
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dpefb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates a tree in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpefb_game_parse(text: *const c_char, out: *mut *mut DpefbGame) -> DpefbStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Fail(DpefbStatus::InvalidUtf8, "tree text is not UTF-8".into()))?;
        let game = Game::parse(text)?;
        *out = Box::into_raw(Box::new(DpefbGame { game }));
        Ok(())
    })
}

/// # Safety
/// `game` must come from `dpefb_game_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dpefb_game_free(game: *mut DpefbGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of nodes, or 0 for NULL.
///
/// # Safety
/// `game` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpefb_game_node_count(game: *const DpefbGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.tree.len())
}

/// Number of learner actions, or 0 for NULL.
///
/// # Safety
/// `game` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpefb_game_action_count(game: *const DpefbGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.tree.actions().len())
}

/// Number of reduced strategies. Fails with `InvalidArgument` above `u64::MAX`.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpefb_game_strategy_count(game: *const DpefbGame, out: *mut u64) -> DpefbStatus {
    guard(|| {
        let g = &as_ref(game, "game")?.game;
        let out = as_mut(out, "out")?;
        let n = g.profiles.n(g.tree.root());
        *out = u64::try_from(n).map_err(|_| invalid(format!("strategy count {n} exceeds u64")))?;
        Ok(())
    })
}

/// Creates a learner for `horizon` trials at privacy level `epsilon` (in (0, 1)).
///
/// # Safety
/// `game` must be a live handle; `out` must be writable. The server keeps its
/// own reference to the game, so `game` may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn dpefb_server_new(
    game: *const DpefbGame,
    horizon: u64,
    epsilon: f64,
    seed: u64,
    out: *mut *mut DpefbServer,
) -> DpefbStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        let game = Arc::clone(&as_ref(game, "game")?.game);
        let schedule = compute_schedule(&game, horizon, epsilon, false)?;
        *out = Box::into_raw(Box::new(DpefbServer {
            state: ServerState::new(game, schedule),
            rng: stream(seed, 0),
            pending: None,
        }));
        Ok(())
    })
}

/// # Safety
/// `server` must come from `dpefb_server_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dpefb_server_free(server: *mut DpefbServer) {
    if !server.is_null() {
        drop(Box::from_raw(server));
    }
}

/// Samples the next reduced strategy and writes it as parallel arrays of
/// (infoset, action) in infoset-id order. The strategy stays pending until
/// `dpefb_server_update`; sampling again replaces it.
///
/// If `capacity` is too small, `*out_len` receives the required length, the
/// pending strategy is kept, and `BufferTooSmall` is returned.
///
/// # Safety
/// `infosets` and `actions` must each hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn dpefb_server_sample(
    server: *mut DpefbServer,
    infosets: *mut u32,
    actions: *mut u32,
    capacity: usize,
    out_len: *mut usize,
) -> DpefbStatus {
    guard(|| {
        let s = as_mut(server, "server")?;
        let out_len = as_mut(out_len, "out_len")?;
        let sigma = s.state.sample_strategy(&mut s.rng);
        *out_len = sigma.len();
        if sigma.len() > capacity {
            s.pending = Some(sigma);
            return Err(Fail(DpefbStatus::BufferTooSmall, format!("need {} slots", *out_len)));
        }
        if infosets.is_null() || actions.is_null() {
            return Err(null("output buffer"));
        }
        for (i, (v, a)) in sigma.iter().enumerate() {
            *infosets.add(i) = v.0;
            *actions.add(i) = a.0;
        }
        s.pending = Some(sigma);
        Ok(())
    })
}

/// Applies a privatized report for the pending strategy. The report is given
/// as parallel arrays over exactly the actions that strategy reaches.
///
/// # Safety
/// `actions` and `values` must each hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn dpefb_server_update(
    server: *mut DpefbServer,
    actions: *const u32,
    values: *const f64,
    len: usize,
) -> DpefbStatus {
    guard(|| {
        let s = as_mut(server, "server")?;
        let actions = input(actions, len, "actions")?;
        let values = input(values, len, "values")?;
        let Some(sigma) = s.pending.as_ref() else {
            return Err(Fail(
                DpefbStatus::NoPendingStrategy,
                "no sampled strategy to update".into(),
            ));
        };
        let game = Arc::clone(s.state.game());
        let mut report = UserReport {
            trial: s.state.trial() + 1,
            values: Default::default(),
        };
        for (&a, &x) in actions.iter().zip(values) {
            if report.values.insert(node(&game, a)?, x).is_some() {
                return Err(invalid(format!("action {a} reported twice")));
            }
        }
        s.state.update_policy(sigma, &report)?;
        s.pending = None;
        Ok(())
    })
}

/// Current probability of `action` at its infoset.
///
/// # Safety
/// `server` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpefb_server_probability(
    server: *const DpefbServer,
    action: u32,
    out: *mut f64,
) -> DpefbStatus {
    guard(|| {
        let s = as_ref(server, "server")?;
        let out = as_mut(out, "out")?;
        let a = node(s.state.game(), action)?;
        if !s.state.game().tree.is_action(a) {
            return Err(invalid(format!("{a} is not an action")));
        }
        *out = s.state.probability(a);
        Ok(())
    })
}

/// Number of completed updates, or 0 for NULL.
///
/// # Safety
/// `server` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpefb_server_trial(server: *const DpefbServer) -> u64 {
    server.as_ref().map_or(0, |s| s.state.trial())
}

/// Creates a user with its own noise stream.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpefb_user_new(
    game: *const DpefbGame,
    epsilon: f64,
    seed: u64,
    out: *mut *mut DpefbUser,
) -> DpefbStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        let game = Arc::clone(&as_ref(game, "game")?.game);
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::EpsilonOutOfRange(epsilon).into());
        }
        *out = Box::into_raw(Box::new(DpefbUser {
            game,
            mechanism: LaplaceMechanism::for_epsilon(epsilon),
            env: None,
            rng: user_stream(seed, 0),
            trial: 0,
        }));
        Ok(())
    })
}

/// # Safety
/// `user` must come from `dpefb_user_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dpefb_user_free(user: *mut DpefbUser) {
    if !user.is_null() {
        drop(Box::from_raw(user));
    }
}

/// Sets the environment for the following trials: `next[i]` is the child
/// reached after `actions[i]`. Every action must appear exactly once.
///
/// # Safety
/// `actions` and `next` must each hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn dpefb_user_set_environment(
    user: *mut DpefbUser,
    actions: *const u32,
    next: *const u32,
    len: usize,
) -> DpefbStatus {
    guard(|| {
        let u = as_mut(user, "user")?;
        let actions = input(actions, len, "actions")?;
        let next = input(next, len, "next")?;
        let pairs = actions
            .iter()
            .zip(next)
            .map(|(&a, &c)| Ok((node(&u.game, a)?, node(&u.game, c)?)))
            .collect::<Result<Vec<_>, Fail>>()?;
        u.env = Some(Environment::new(&u.game.tree, pairs)?);
        Ok(())
    })
}

/// Plays a strategy against the current environment and writes the
/// privatized report as parallel arrays over the reached actions. The true
/// loss goes to `out_loss` when it is not NULL; it is for local bookkeeping
/// and must not be sent to the server.
///
/// If `capacity` is too small, `*out_len` receives the required length and
/// `BufferTooSmall` is returned without consuming noise.
///
/// # Safety
/// `infosets`/`actions` must hold `len` elements; `out_actions`/`out_values`
/// must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn dpefb_user_respond(
    user: *mut DpefbUser,
    infosets: *const u32,
    actions: *const u32,
    len: usize,
    out_actions: *mut u32,
    out_values: *mut f64,
    capacity: usize,
    out_len: *mut usize,
    out_loss: *mut f64,
) -> DpefbStatus {
    guard(|| {
        let u = as_mut(user, "user")?;
        let out_len = as_mut(out_len, "out_len")?;
        let infosets = input(infosets, len, "infosets")?;
        let actions = input(actions, len, "actions")?;
        let env = u.env.as_ref().ok_or_else(|| invalid("no environment set"))?;
        let tree = &u.game.tree;
        let pairs = infosets
            .iter()
            .zip(actions)
            .map(|(&v, &a)| Ok((node(&u.game, v)?, node(&u.game, a)?)))
            .collect::<Result<Vec<_>, Fail>>()?;
        let sigma = ReducedStrategy::from_pairs(pairs);
        if sigma.len() != len {
            return Err(invalid("infoset listed twice"));
        }
        sigma.validate(tree)?;
        let outcome = play(tree, &sigma, env)?;
        let needed = dpefb::game_tree::reachable_sets(tree, &sigma).actions.len();
        *out_len = needed;
        if needed > capacity {
            return Err(Fail(DpefbStatus::BufferTooSmall, format!("need {needed} slots")));
        }
        if out_actions.is_null() || out_values.is_null() {
            return Err(null("output buffer"));
        }
        u.trial += 1;
        let report = u.mechanism.report(tree, &sigma, &outcome, u.trial, &mut u.rng)?;
        for (i, (a, x)) in report.values.iter().enumerate() {
            *out_actions.add(i) = a.0;
            *out_values.add(i) = *x;
        }
        if !out_loss.is_null() {
            *out_loss = outcome.loss;
        }
        Ok(())
    })
}
