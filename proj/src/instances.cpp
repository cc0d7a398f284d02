#include "qaev/instances.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace qaev {

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::ec3: return "EC3";
        case ProblemKind::ec2: return "EC2";
        case ProblemKind::ec3multi: return "EC3multi";
    }
    throw ConfigError("unknown problem kind");
}

ProblemKind problem_kind_from_string(const std::string& name) {
    if (name == "EC3" || name == "ec3") return ProblemKind::ec3;
    if (name == "EC2" || name == "ec2") return ProblemKind::ec2;
    if (name == "EC3multi" || name == "ec3multi") return ProblemKind::ec3multi;
    throw ConfigError("unknown problem name: " + name);
}

Clause::Clause(std::vector<int> bit_indices) : bits(std::move(bit_indices)) {
    std::sort(bits.begin(), bits.end());
    if (bits.size() != 2 && bits.size() != 3)
        throw ConfigError("clause arity must be 2 or 3, got " + std::to_string(bits.size()));
    if (std::adjacent_find(bits.begin(), bits.end()) != bits.end())
        throw ConfigError("clause bits must be distinct");
    if (bits.front() < 1 || bits.back() > kDefaultCapacityBits)
        throw ConfigError("clause bit outside [1, " + std::to_string(kDefaultCapacityBits) + "]");
}

void Clause::validate(int n_bits) const {
    if (arity() != 2 && arity() != 3) throw ConfigError("clause arity must be 2 or 3");
    for (int b : bits)
        if (b < 1 || b > n_bits)
            throw ConfigError("clause bit " + std::to_string(b) + " outside [1, " +
                              std::to_string(n_bits) + "]");
}

int clause_energy(const Clause& clause, Assignment z) {
    int ones = 0;
    for (int b : clause.bits) ones += assignment_bit(z, b);
    return ones == 1 ? 0 : 1;
}

std::int64_t total_energy(int, const std::vector<Clause>& clauses, Assignment z) {
    std::int64_t e = 0;
    for (const Clause& c : clauses) e += clause_energy(c, z);
    return e;
}

std::int64_t total_energy(const Instance& instance, Assignment z) {
    return total_energy(instance.n, instance.clauses, z);
}

std::vector<Assignment> count_satisfying(int n_bits, const std::vector<Clause>& clauses,
                                         int cap_bits) {
    require_capacity(n_bits, cap_bits);
    for (const Clause& c : clauses) c.validate(n_bits);
    std::vector<Assignment> sat;
    const Assignment dim = Assignment(1) << n_bits;
    for (Assignment z = 0; z < dim; ++z)
        if (total_energy(n_bits, clauses, z) == 0) sat.push_back(z);
    return sat;
}

Clause random_clause(int n_bits, int arity, Rng& rng) {
    if (arity != 2 && arity != 3) throw ConfigError("clause arity must be 2 or 3");
    if (arity > n_bits)
        throw ConfigError("clause arity " + std::to_string(arity) + " exceeds bit count " +
                          std::to_string(n_bits));
    std::vector<int> bits;
    bits.reserve(static_cast<std::size_t>(arity));
    while (static_cast<int>(bits.size()) < arity) {
        const int b = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n_bits)));
        if (std::find(bits.begin(), bits.end(), b) == bits.end()) bits.push_back(b);
    }
    return Clause(std::move(bits));
}

namespace {

// Generic acceptance loop. Clauses are added one at a time and the surviving
// satisfying set filtered down (adding a constraint never adds solutions).
// accept/reject decide on the count after each addition.
Instance generate_loop(ProblemKind kind, int n_bits, int arity, Rng& rng,
                       const GenerationLimits& limits, std::uint64_t count_accept_lo,
                       std::uint64_t count_accept_hi) {
    require_capacity(n_bits, limits.cap_bits);
    if (arity > n_bits)
        throw ConfigError("cannot generate arity-" + std::to_string(arity) +
                          " clauses over n = " + std::to_string(n_bits));
    const int max_clauses =
        limits.max_clauses_per_attempt > 0 ? limits.max_clauses_per_attempt : 16 * n_bits + 64;
    const Assignment dim = Assignment(1) << n_bits;

    for (std::int64_t restart = 0; restart <= limits.max_restarts; ++restart) {
        std::vector<Clause> clauses;
        std::vector<Assignment> sat(dim);
        for (Assignment z = 0; z < dim; ++z) sat[z] = z;

        while (static_cast<int>(clauses.size()) < max_clauses) {
            Clause c = random_clause(n_bits, arity, rng);
            std::vector<Assignment> kept;
            kept.reserve(sat.size());
            for (Assignment z : sat)
                if (clause_energy(c, z) == 0) kept.push_back(z);
            sat = std::move(kept);
            clauses.push_back(std::move(c));

            const std::uint64_t count = sat.size();
            if (count >= count_accept_lo && count <= count_accept_hi) {
                Instance inst;
                inst.n = n_bits;
                inst.problem = kind;
                inst.clauses = std::move(clauses);
                inst.satisfying = std::move(sat);
                return inst;
            }
            if (count < count_accept_lo) break;  // overshot (possibly to zero): restart
        }
    }
    throw GenerationError("instance generation for " + to_string(kind) + " at n = " +
                          std::to_string(n_bits) + " exhausted " +
                          std::to_string(limits.max_restarts) + " restarts");
}

}  // namespace

Instance generate_ec3_unique(int n_bits, Rng& rng, const GenerationLimits& limits) {
    if (n_bits < 3) throw ConfigError("EC3 needs n >= 3");
    return generate_loop(ProblemKind::ec3, n_bits, 3, rng, limits, 1, 1);
}

Instance generate_ec2_pair(int n_bits, Rng& rng, const GenerationLimits& limits) {
    if (n_bits < 2) throw ConfigError("EC2 needs n >= 2");
    return generate_loop(ProblemKind::ec2, n_bits, 2, rng, limits, 2, 2);
}

Instance generate_ec3_multi(int n_bits, Rng& rng, const GenerationLimits& limits) {
    if (n_bits < 3) throw ConfigError("EC3 needs n >= 3");
    return generate_loop(ProblemKind::ec3multi, n_bits, 3, rng, limits, 6, 9);
}

Instance generate(ProblemKind kind, int n_bits, Rng& rng, const GenerationLimits& limits) {
    switch (kind) {
        case ProblemKind::ec3: return generate_ec3_unique(n_bits, rng, limits);
        case ProblemKind::ec2: return generate_ec2_pair(n_bits, rng, limits);
        case ProblemKind::ec3multi: return generate_ec3_multi(n_bits, rng, limits);
    }
    throw ConfigError("unknown problem kind");
}

std::string to_json(const Instance& instance) {
    nlohmann::json j;
    j["n"] = instance.n;
    j["problem"] = to_string(instance.problem);
    j["seed"] = instance.seed;
    auto& jc = j["clauses"] = nlohmann::json::array();
    for (const Clause& c : instance.clauses) jc.push_back(c.bits);
    j["satisfying"] = instance.satisfying;
    return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad instance JSON: ") + e.what());
    }
    Instance inst;
    inst.n = j.at("n").get<int>();
    require_capacity(inst.n);
    inst.problem = problem_kind_from_string(j.at("problem").get<std::string>());
    inst.seed = j.value("seed", std::uint64_t{0});
    for (const auto& jc : j.at("clauses")) {
        Clause c(jc.get<std::vector<int>>());
        c.validate(inst.n);
        inst.clauses.push_back(std::move(c));
    }
    // The satisfying list is re-derived, not trusted.
    inst.satisfying = count_satisfying(inst.n, inst.clauses);
    if (j.contains("satisfying")) {
        const auto stored = j["satisfying"].get<std::vector<Assignment>>();
        if (stored != inst.satisfying)
            throw IoError("instance JSON satisfying list disagrees with brute-force recount");
    }
    return inst;
}

void save_instance(const Instance& instance, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << to_json(instance);
    if (!out) throw IoError("write failed: " + path);
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return instance_from_json(text);
}

}  // namespace qaev
