use crate::cluster::ClusterMaps;
use crate::corpus::{assign_type, AssociationTable, CategoryMap, Slot, TypedVerb};

use super::kernel::{group_by_message, KernelRecord};
use super::vector::FeatureVector;

/// How a kernel reached its feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// The typed verb is clustered; carries `g(f(typed_verb))`.
    Exact(usize),
    /// Verb known, signature not; carries the global id of the verb's
    /// largest sense.
    VerbFallback(usize),
    Oov,
}

fn type_kernel(k: &KernelRecord, cmap: &CategoryMap, assoc: &AssociationTable) -> Option<TypedVerb> {
    let key = k.verb_key();
    let subject_type = assign_type(cmap, assoc, &key, Slot::Subject, k.subject_np.as_deref()?)?;
    let object_type = match &k.object_np {
        Some(np) => Some(assign_type(cmap, assoc, &key, Slot::Object, np)?),
        None => None,
    };
    Some(TypedVerb::new(k.verb.clone(), k.preposition.clone(), subject_type, object_type))
}

pub fn route_kernel(
    kernel: &KernelRecord,
    cmap: &CategoryMap,
    assoc: &AssociationTable,
    maps: &ClusterMaps,
) -> Route {
    if let Some(g) = type_kernel(kernel, cmap, assoc).and_then(|tv| maps.global_of(&tv)) {
        return Route::Exact(g);
    }
    match maps.fallback_global(&kernel.verb_key()) {
        Some(g) => Route::VerbFallback(g),
        None => Route::Oov,
    }
}

/// One vector per message (in id order) over `maps.num_global() + 1`
/// features; the last id counts out-of-vocabulary kernels.
pub fn featurize(
    kernels: &[KernelRecord],
    cmap: &CategoryMap,
    assoc: &AssociationTable,
    maps: &ClusterMaps,
) -> Vec<FeatureVector> {
    let dim = maps.num_global() + 1;
    let oov = maps.num_global();
    group_by_message(kernels)
        .into_iter()
        .map(|(id, ks)| {
            let mut v = FeatureVector::empty(id, dim);
            for k in ks {
                v.increment(match route_kernel(k, cmap, assoc, maps) {
                    Route::Exact(g) | Route::VerbFallback(g) => g,
                    Route::Oov => oov,
                });
            }
            v
        })
        .collect()
}
