#include "partmc/partition/partition.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace partmc {

namespace {

struct HalfRange {
    std::size_t begin, end;
};

HalfRange gamma_half(const PartitionBuffer& buf, HalfSplit split) {
    const std::size_t n = buf.records.size(), h = n / 2;
    return split == HalfSplit::first_for_gamma ? HalfRange{0, h} : HalfRange{n - h, n};
}

HalfRange b_half(const PartitionBuffer& buf, HalfSplit split) {
    const std::size_t n = buf.records.size(), h = n / 2;
    return split == HalfSplit::first_for_gamma ? HalfRange{h, n} : HalfRange{0, n - h};
}

double b_mass(const PartitionBuffer& buf, HalfSplit split) {
    const HalfRange r = b_half(buf, split);
    double sum = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i)
        sum += buf.records[i].scalar;
    return sum;
}

}  // namespace

int PartitionSet::owner(const Signature& s) const {
    const auto it = std::lower_bound(selected.begin(), selected.end(), s);
    if (it == selected.end() || *it != s)
        return static_cast<int>(partitions.size()) - 1;
    for (int i = 0; i + 1 < static_cast<int>(partitions.size()); ++i)
        if (partitions[i].signatures.front() == s)
            return i;
    return static_cast<int>(partitions.size()) - 1;
}

double gamma(const PartitionBuffer& buffer, HalfSplit split) {
    const HalfRange r = gamma_half(buffer, split);
    double sum = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i)
        sum += buffer.records[i].scalar;
    return sum;
}

PartitionSet select_partitions(const Census& census, int K, const SelectionLimits& limits, HalfSplit split) {
    if (K < 0)
        throw std::invalid_argument("select_partitions: K must be non-negative");

    struct Ranked {
        const Signature* sig;
        double gamma;
    };
    std::vector<Ranked> ranked;
    for (const auto& [sig, buf] : census)
        ranked.push_back({&sig, gamma(buf, split)});
    // map order is lexicographic, so a stable sort breaks ties by signature
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.gamma > b.gamma; });

    const std::size_t positive = static_cast<std::size_t>(
        std::count_if(ranked.begin(), ranked.end(), [](const Ranked& r) { return r.gamma > 0.0; }));
    std::size_t k = static_cast<std::size_t>(K);
    if (k > positive) {
        spdlog::warn("only {} signatures have positive gamma; using K = {} instead of {}", positive, positive, K);
        k = positive;
    }
    if (limits.width > 0 && limits.height > 0) {
        const std::size_t per_image = static_cast<std::size_t>(limits.width) * limits.height * 3 * sizeof(float);
        const std::size_t fit = limits.memory_cap_bytes / per_image;
        if (k > fit) {
            spdlog::warn("guidance images for K = {} exceed the {} MB cap; using K = {}", k,
                         limits.memory_cap_bytes >> 20, fit);
            k = fit;
        }
    }

    PartitionSet set;
    set.K = static_cast<int>(k);
    Partition comp;
    comp.complementary = true;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i < k) {
            Partition p;
            p.id = static_cast<int>(i);
            p.signatures = {*ranked[i].sig};
            p.gamma = ranked[i].gamma;
            set.partitions.push_back(std::move(p));
            set.selected.push_back(*ranked[i].sig);
        } else {
            comp.signatures.push_back(*ranked[i].sig);
            comp.gamma += ranked[i].gamma;
        }
    }
    comp.id = static_cast<int>(k);
    std::sort(comp.signatures.begin(), comp.signatures.end());
    std::sort(set.selected.begin(), set.selected.end());
    set.partitions.push_back(std::move(comp));

    double total = 0.0;
    for (const Partition& p : set.partitions)
        total += p.gamma;
    for (Partition& p : set.partitions)
        p.P = total > 0.0 ? p.gamma / total : (p.complementary ? 1.0 : 0.0);
    return set;
}

double estimate_b(const Partition& partition, const Census& census, uint64_t total_samples, HalfSplit split) {
    if (total_samples == 0)
        throw std::invalid_argument("estimate_b: empty pre-pass");
    double sum = 0.0;
    for (const Signature& s : partition.signatures) {
        const auto it = census.find(s);
        if (it != census.end())
            sum += b_mass(it->second, split);
    }
    return sum / (static_cast<double>(total_samples) / 2.0);
}

double unpartitioned_b(const Census& census, uint64_t total_samples, HalfSplit split) {
    if (total_samples == 0)
        throw std::invalid_argument("unpartitioned_b: empty pre-pass");
    double sum = 0.0;
    for (const auto& [sig, buf] : census)
        sum += b_mass(buf, split);
    return sum / (static_cast<double>(total_samples) / 2.0);
}

void finalize_partitions(PartitionSet& set, const Census& census, uint64_t total_samples, HalfSplit split) {
    for (Partition& p : set.partitions)
        p.b = estimate_b(p, census, total_samples, split);

    // selected members without second-half mass join the complement
    Partition& comp = set.complementary();
    std::vector<Partition> kept;
    for (std::size_t i = 0; i + 1 < set.partitions.size(); ++i) {
        Partition& p = set.partitions[i];
        if (p.b > 0.0) {
            kept.push_back(std::move(p));
            continue;
        }
        spdlog::warn("partition {} has no second-half contribution; merged into the complement",
                     p.signatures.front().str());
        comp.signatures.push_back(p.signatures.front());
        comp.gamma += p.gamma;
        comp.P += p.P;
        set.selected.erase(std::find(set.selected.begin(), set.selected.end(), p.signatures.front()));
    }
    std::sort(comp.signatures.begin(), comp.signatures.end());
    kept.push_back(std::move(comp));
    set.partitions = std::move(kept);
    set.K = static_cast<int>(set.partitions.size()) - 1;
    for (int i = 0; i < static_cast<int>(set.partitions.size()); ++i)
        set.partitions[i].id = i;
    set.complementary().b = estimate_b(set.complementary(), census, total_samples, split);

    for (Partition& p : set.partitions) {
        p.reservoir.clear();
        for (const Signature& s : p.signatures) {
            const auto it = census.find(s);
            if (it == census.end())
                continue;
            const PartitionBuffer& buf = it->second;
            const HalfRange r = b_half(buf, split);
            for (std::size_t i = r.begin; i < r.end; ++i) {
                const PathRecord& rec = buf.records[i];
                p.reservoir.push_back({rec.scalar, rec.seed, rec.pixel, rec.emission, s});
            }
        }
    }
}

PartitionSet build_partitions(const PrepassResult& prepass, int K, const SelectionLimits& limits, HalfSplit split) {
    PartitionSet set = select_partitions(prepass.census, K, limits, split);
    finalize_partitions(set, prepass.census, prepass.total_samples(), split);
    return set;
}

std::size_t pick_reservoir(const std::vector<ReservoirEntry>& reservoir, double u) {
    if (reservoir.empty())
        throw std::invalid_argument("pick_reservoir: empty reservoir");
    double total = 0.0;
    for (const ReservoirEntry& e : reservoir)
        total += e.scalar;
    const double target = u * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < reservoir.size(); ++i) {
        acc += reservoir[i].scalar;
        if (target < acc)
            return i;
    }
    // u * total rounded up to the full sum: last entry with positive weight
    for (std::size_t i = reservoir.size(); i-- > 0;)
        if (reservoir[i].scalar > 0.0)
            return i;
    return reservoir.size() - 1;
}

double MutationStats::acceptance_rate(MutationType t) const {
    const uint64_t n = proposed[static_cast<int>(t)];
    return n == 0 ? 0.0 : static_cast<double>(accepted[static_cast<int>(t)]) / static_cast<double>(n);
}

MutationStats& MutationStats::operator+=(const MutationStats& o) {
    for (int i = 0; i < kMutationTypes; ++i) {
        proposed[i] += o.proposed[i];
        accepted[i] += o.accepted[i];
    }
    return *this;
}

void assign_path(ChainState& state, Path path, const Scene& scene) {
    state.fstar = scalar_contribution(path.f);
    state.pi = lens_perturbable(path)      ? scalar_contribution(image_plane_contribution(path, scene))
               : caustic_perturbable(path) ? scalar_contribution(emission_direction_contribution(path, scene))
                                           : 0.0;
    state.q = -1.0;
    state.current = std::move(path);
}

ChainState init_chain(const Partition& partition, const Scene& scene, int burn_in, RandomStream stream,
                      const std::function<void(ChainState&)>& step) {
    if (partition.reservoir.empty())
        throw std::invalid_argument("init_chain: partition has an empty reservoir");
    const ReservoirEntry& e = partition.reservoir[pick_reservoir(partition.reservoir, stream.uniform())];
    auto path = replay_path(scene, e.pixel, e.seed, e.emission);
    if (!path || path->signature() != e.signature)
        throw std::logic_error("init_chain: replay of a " + e.signature.str() + " record did not reproduce it");

    ChainState state;
    state.partition = partition.id;
    state.stream = stream;
    assign_path(state, std::move(*path), scene);
    if (!(state.fstar > 0.0))
        throw std::logic_error("init_chain: replayed path has zero contribution");
    for (int i = 0; i < burn_in; ++i)
        step(state);
    state.stats = {};
    return state;
}

void write_partition_report(const PartitionSet& set, std::ostream& out) {
    out << "partition,signatures,gamma,P,b,reservoir\n";
    for (const Partition& p : set.partitions) {
        out << p.id << ',';
        if (p.complementary && p.signatures.empty())
            out << "(none)";
        for (std::size_t i = 0; i < p.signatures.size(); ++i)
            out << (i ? "|" : "") << p.signatures[i].str();
        out << ',' << p.gamma << ',' << p.P << ',' << p.b << ',' << p.reservoir.size() << '\n';
    }
}

}  // namespace partmc
