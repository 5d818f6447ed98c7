use rand::Rng;

/// One step of uniform reservoir sampling for the item at 1-based stream
/// `position`: fill until `capacity`, afterwards replace a uniformly chosen
/// slot with probability `capacity / position`.
pub fn reservoir_update<T, R: Rng + ?Sized>(
    position: usize,
    sample: &mut Vec<T>,
    capacity: usize,
    item: T,
    rng: &mut R,
) {
    assert!(capacity >= 1, "reservoir capacity must be at least 1");
    assert!(position >= 1, "stream positions are 1-based");
    if sample.len() < capacity {
        sample.push(item);
        return;
    }
    let slot = rng.random_range(0..position);
    if slot < capacity {
        sample[slot] = item;
    }
}

/// Single-owner uniform sample of a stream.
#[derive(Debug, Clone)]
pub struct Reservoir<T> {
    capacity: usize,
    seen: usize,
    sample: Vec<T>,
}

impl<T> Reservoir<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "reservoir capacity must be at least 1");
        Reservoir {
            capacity,
            seen: 0,
            sample: Vec::with_capacity(capacity),
        }
    }

    pub fn offer<R: Rng + ?Sized>(&mut self, item: T, rng: &mut R) {
        self.seen += 1;
        reservoir_update(self.seen, &mut self.sample, self.capacity, item, rng);
    }

    pub fn seen(&self) -> usize {
        self.seen
    }

    pub fn sample(&self) -> &[T] {
        &self.sample
    }

    pub fn into_sample(self) -> Vec<T> {
        self.sample
    }
}
