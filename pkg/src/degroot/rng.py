"""
Module hosting the small random source every stochastic part of the package
draws from.

The generator is xorshift64* (Vigna) seeded through one splitmix64 step, so a
trace produced here can be replayed bit for bit by any other implementation
that follows the same recurrences:

    state ^= state >> 12
    state ^= state << 25
    state ^= state >> 27
    output = state * 0x2545F4914F6CDD1D  (mod 2**64)

Floats take the top 53 bits of an output, integers below a bound take the
output modulo the bound.
"""
import hashlib

MASK64 = 0xFFFFFFFFFFFFFFFF
MULTIPLIER = 0x2545F4914F6CDD1D


def splitmix64(value):
    """Single splitmix64 scrambling step, used to turn any seed into a state"""
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed, *labels):
    """
    Stable 64-bit seed for a labelled sub-stream of an experiment.
    The seed is the first 8 bytes (big endian) of the SHA-256 digest of
    base_seed and labels joined by ':'.
    """
    text = ":".join(str(part) for part in (base_seed,) + labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class XorShift64Star(object):
    """xorshift64* generator with a few sampling helpers"""

    def __init__(self, seed=0):
        if seed < 0:
            raise ValueError("seed must be an unsigned integer, got {0}".format(seed))
        self.seed = seed
        self.state = splitmix64(seed & MASK64) or 1

    def next_uint64(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * MULTIPLIER) & MASK64

    def random(self):
        """Uniform float in [0, 1)"""
        return (self.next_uint64() >> 11) * (1.0 / 9007199254740992.0)

    def uniform(self, low, high):
        return low + (high - low) * self.random()

    def randbelow(self, bound):
        if bound <= 0:
            raise ValueError("bound must be positive, got {0}".format(bound))
        return self.next_uint64() % bound

    def permutation(self, n):
        """Fisher-Yates shuffle of range(n), drawing from the back"""
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, population, k):
        """
        k distinct elements of population without replacement, in draw order.
        A partial Fisher-Yates from the front, so samples drawn with the same
        seed and a growing k are nested prefixes of each other.
        """
        pool = list(population)
        if k > len(pool):
            raise ValueError(
                "cannot sample {0} items from {1}".format(k, len(pool)))
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def __str__(self):
        return "xorshift64* generator seeded with {0}".format(self.seed)
