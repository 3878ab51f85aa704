use rand::Rng;

use crate::corpus::TypedTriple;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replaced {
    Head,
    Tail,
}

fn draw_different<T: PartialEq + Clone, R: Rng + ?Sized>(current: &T, pool: &[T], rng: &mut R) -> T {
    loop {
        let candidate = &pool[rng.random_range(0..pool.len())];
        if candidate != current {
            return candidate.clone();
        }
    }
}

fn check_pool<T: PartialEq>(pool: &[T], what: &str) -> Result<()> {
    let distinct = pool.iter().any(|x| *x != pool[0]);
    if pool.len() < 2 || !distinct {
        return Err(Error::contract(format!(
            "{what} pool needs at least 2 distinct members to corrupt a triple"
        )));
    }
    Ok(())
}

/// Replaces the head (with probability 0.5) or the tail of a pair by a
/// different member of the matching pool. A head pool with fewer than two
/// distinct members forces tail replacement.
pub fn corrupt_pair<T: PartialEq + Clone, R: Rng + ?Sized>(
    head: &T,
    tail: &T,
    head_pool: &[T],
    tail_pool: &[T],
    rng: &mut R,
) -> Result<(T, T, Replaced)> {
    check_pool(tail_pool, "tail")?;
    let head_ok = check_pool(head_pool, "head").is_ok();
    let replace_head = rng.random_bool(0.5) && head_ok;
    Ok(if replace_head {
        (draw_different(head, head_pool, rng), tail.clone(), Replaced::Head)
    } else {
        (head.clone(), draw_different(tail, tail_pool, rng), Replaced::Tail)
    })
}

/// Corrupts a transitive typed triple by swapping its subject or object for
/// a different noun phrase drawn uniformly from `entity_pool`.
pub fn corrupt<R: Rng + ?Sized>(
    triple: &TypedTriple,
    entity_pool: &[String],
    rng: &mut R,
) -> Result<TypedTriple> {
    let object = triple
        .object_np
        .as_ref()
        .ok_or_else(|| Error::contract("cannot corrupt a triple without an object"))?;
    check_pool(entity_pool, "entity")?;
    let (subject_np, object_np, _) =
        corrupt_pair(&triple.subject_np, object, entity_pool, entity_pool, rng)?;
    Ok(TypedTriple {
        subject_np,
        object_np: Some(object_np),
        ..triple.clone()
    })
}
