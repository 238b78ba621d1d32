//! Fan-out over independent runs. With the `parallel` feature (default) this
//! uses rayon; without it every map is a plain sequential loop. Output order
//! always matches input order.

/// Maps `f` over `items` on the rayon pool when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    sequential_map(items, f)
}

pub fn sequential_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Runs two independent closures, concurrently when possible.
#[cfg(feature = "parallel")]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    rayon::join(a, b)
}

#[cfg(not(feature = "parallel"))]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    (a(), b())
}

/// Collects `Vec<Result<T>>` into `Result<Vec<T>>`, keeping the first error in input order.
pub fn collect_results<T, E>(items: Vec<Result<T, E>>) -> Result<Vec<T>, E> {
    items.into_iter().collect()
}
