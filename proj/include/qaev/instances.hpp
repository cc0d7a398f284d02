#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qaev/common.hpp"
#include "qaev/rng.hpp"

namespace qaev {

// An assignment of n bits packed into an integer. Bit i (1-based, as clauses
// index bits) is stored at integer bit i-1, so z_i = (value >> (i-1)) & 1.
using Assignment = std::uint32_t;

inline int assignment_bit(Assignment z, int bit_index) {
    return static_cast<int>((z >> (bit_index - 1)) & 1u);
}

enum class ProblemKind { ec3, ec2, ec3multi };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

// An Exact Cover clause over 2 or 3 distinct bits: satisfied iff exactly one
// of its bits is 1. Bits are kept sorted; all orderings of the same set
// denote the same clause.
struct Clause {
    std::vector<int> bits;

    Clause() = default;
    explicit Clause(std::vector<int> bit_indices);

    int arity() const { return static_cast<int>(bits.size()); }
    void validate(int n_bits) const;
};

struct Instance {
    int n = 0;
    ProblemKind problem = ProblemKind::ec3;
    std::uint64_t seed = 0;
    std::vector<Clause> clauses;                 // insertion order, duplicates allowed
    std::vector<Assignment> satisfying;          // sorted; equals {z : h(z) = 0}

    Index dim() const { return dimension(n); }
};

// 0 if z satisfies the clause, 1 if it violates it.
int clause_energy(const Clause& clause, Assignment z);

// Number of violated clauses h(z), duplicates counted with multiplicity.
std::int64_t total_energy(const Instance& instance, Assignment z);
std::int64_t total_energy(int n_bits, const std::vector<Clause>& clauses, Assignment z);

// Exhaustive enumeration of {z : h(z) = 0} over all 2^n assignments.
std::vector<Assignment> count_satisfying(int n_bits, const std::vector<Clause>& clauses,
                                         int cap_bits = kDefaultCapacityBits);

// arity distinct bits drawn uniformly from [1, n].
Clause random_clause(int n_bits, int arity, Rng& rng);

struct GenerationLimits {
    // Restarts before giving up; restarting is normal, exhausting this is an error.
    std::int64_t max_restarts = 1'000'000;
    // Clauses per attempt before the attempt is discarded (counts as a restart).
    // Guards inputs where the acceptance count can never be reached (e.g. EC3
    // with n = 3, where the only possible clause keeps the count at 3).
    int max_clauses_per_attempt = 0;  // 0 -> 16*n + 64
    int cap_bits = kDefaultCapacityBits;
};

// Add random 3-clauses until exactly one satisfying assignment remains;
// restart from scratch whenever the count hits zero.
Instance generate_ec3_unique(int n_bits, Rng& rng, const GenerationLimits& limits = {});

// Same loop with 2-clauses, accepting at exactly two satisfying assignments
// (EC2's bit-negation symmetry makes a unique assignment impossible).
Instance generate_ec2_pair(int n_bits, Rng& rng, const GenerationLimits& limits = {});

// Add 3-clauses while more than 9 assignments survive; accept on 6..9,
// restart if a clause jumps the count from >9 straight below 6.
Instance generate_ec3_multi(int n_bits, Rng& rng, const GenerationLimits& limits = {});

Instance generate(ProblemKind kind, int n_bits, Rng& rng, const GenerationLimits& limits = {});

// JSON serialization:
// {"n": int, "clauses": [[bits...]...], "satisfying": [ints...],
//  "seed": int, "problem": "EC3"|"EC2"|"EC3multi"}
std::string to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);
void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace qaev
