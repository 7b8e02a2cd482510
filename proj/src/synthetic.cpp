#include "kgalign/synthetic.hpp"

#include "kgalign/errors.hpp"
#include "kgalign/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace kgalign {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

std::vector<int> sample_without_replacement(int population, int k, std::mt19937_64& rng) {
    std::vector<int> idx(static_cast<std::size_t>(population));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, population - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

} // namespace

SyntheticKgPair generate_synthetic_kg(const SyntheticKgSpec& spec, std::uint64_t seed) {
    if (spec.entity_count < 2) {
        throw InvalidArgument("generate_synthetic_kg: need at least 2 entities");
    }
    if (!(spec.relation_proportion > 0.0 && spec.relation_proportion <= 1.0) ||
        !(spec.triplet_proportion > 0.0 && spec.triplet_proportion <= 1.0)) {
        throw InvalidArgument("generate_synthetic_kg: proportions must lie in (0, 1]");
    }
    if (spec.alpha && !(*spec.alpha > 0.0 && *spec.alpha < 1.0)) {
        throw InvalidArgument("generate_synthetic_kg: alpha must lie in (0, 1)");
    }
    if (spec.nn_concept_ratio < 1.0) {
        throw InvalidArgument("generate_synthetic_kg: concept ratio must be >= 1");
    }

    std::mt19937_64 rng(derive_seed(seed, seed_tag::kSyntheticKg));

    const int n_e = spec.entity_count;
    const int n_r = std::max(1, round_half_up(n_e * spec.relation_proportion));

    SyntheticKgPair pair;
    for (int i = 0; i < n_e; ++i) pair.kg_g.add_entity("ge" + std::to_string(i));
    for (int i = 0; i < n_r; ++i) pair.kg_g.add_relation("gr" + std::to_string(i));

    const double quota = spec.triplet_proportion * n_e * n_e; // per-relation budget
    std::normal_distribution<double> coverage_dist(
        0.5, spec.alpha ? std::sqrt(0.1 * (1.0 - *spec.alpha) + 0.01 * *spec.alpha) : 0.0);
    for (int rel = 0; rel < n_r; ++rel) {
        double coverage = 1.0;
        if (spec.alpha) {
            coverage = std::clamp(coverage_dist(rng), 0.05, 1.0);
        }
        const int count = std::min(n_e * n_e, std::max(1, round_half_up(coverage * quota)));
        for (int cell : sample_without_replacement(n_e * n_e, count, rng)) {
            pair.kg_g.add_triplet(cell / n_e, rel, cell % n_e);
        }
    }

    const int n_e_nn = round_half_up(spec.nn_concept_ratio * n_e);
    const int n_r_nn = round_half_up(spec.nn_concept_ratio * n_r);
    for (int i = 0; i < n_e_nn; ++i) pair.kg_nn.add_entity("ne" + std::to_string(i));
    for (int i = 0; i < n_r_nn; ++i) pair.kg_nn.add_relation("nr" + std::to_string(i));

    // random injection of human concepts into network slots; the inverse is
    // the ground truth the matcher should recover
    std::vector<int> e_slots(static_cast<std::size_t>(n_e_nn));
    std::iota(e_slots.begin(), e_slots.end(), 0);
    std::shuffle(e_slots.begin(), e_slots.end(), rng);
    std::vector<int> r_slots(static_cast<std::size_t>(n_r_nn));
    std::iota(r_slots.begin(), r_slots.end(), 0);
    std::shuffle(r_slots.begin(), r_slots.end(), rng);

    pair.entity_truth.assign(static_cast<std::size_t>(n_e_nn), -1);
    pair.relation_truth.assign(static_cast<std::size_t>(n_r_nn), -1);
    std::vector<int> nn_of_e(static_cast<std::size_t>(n_e));
    std::vector<int> nn_of_r(static_cast<std::size_t>(n_r));
    for (int g = 0; g < n_e; ++g) {
        nn_of_e[static_cast<std::size_t>(g)] = e_slots[static_cast<std::size_t>(g)];
        pair.entity_truth[static_cast<std::size_t>(e_slots[static_cast<std::size_t>(g)])] = g;
    }
    for (int g = 0; g < n_r; ++g) {
        nn_of_r[static_cast<std::size_t>(g)] = r_slots[static_cast<std::size_t>(g)];
        pair.relation_truth[static_cast<std::size_t>(r_slots[static_cast<std::size_t>(g)])] = g;
    }

    for (const auto& t : pair.kg_g.triplets()) {
        pair.kg_nn.add_triplet(nn_of_e[static_cast<std::size_t>(t.head)],
                               nn_of_r[static_cast<std::size_t>(t.relation)],
                               nn_of_e[static_cast<std::size_t>(t.tail)]);
    }

    // surplus concepts participate at the human graph's realized density
    const long full_cells = static_cast<long>(n_e) * n_e * n_r;
    const long nn_cells = static_cast<long>(n_e_nn) * n_e_nn * n_r_nn;
    const long extra_cells = nn_cells - full_cells;
    if (extra_cells > 0) {
        const double density = static_cast<double>(pair.kg_g.triplet_count()) / full_cells;
        const int extra_count = round_half_up(density * static_cast<double>(extra_cells));
        std::uniform_int_distribution<int> pick_e(0, n_e_nn - 1);
        std::uniform_int_distribution<int> pick_r(0, n_r_nn - 1);
        int placed = 0;
        long attempts = 0;
        const long max_attempts = 1000L + 200L * extra_count;
        while (placed < extra_count && attempts < max_attempts) {
            ++attempts;
            const int h = pick_e(rng);
            const int r = pick_r(rng);
            const int t = pick_e(rng);
            const bool extra = pair.entity_truth[static_cast<std::size_t>(h)] < 0 ||
                               pair.relation_truth[static_cast<std::size_t>(r)] < 0 ||
                               pair.entity_truth[static_cast<std::size_t>(t)] < 0;
            if (!extra || pair.kg_nn.has_triplet(h, r, t)) continue;
            pair.kg_nn.add_triplet(h, r, t);
            ++placed;
        }
    }
    return pair;
}

double recovered_fraction(const AlignmentReport& report, const SyntheticKgPair& pair) {
    int truth_total = 0;
    for (int g : pair.entity_truth) truth_total += g >= 0 ? 1 : 0;
    for (int g : pair.relation_truth) truth_total += g >= 0 ? 1 : 0;
    if (truth_total == 0) return 0.0;

    int recovered = 0;
    for (const auto& e : report.sigma) {
        if (e.kind == SymbolKind::Entity) {
            const int nn = pair.kg_nn.entity_index(e.nn_symbol);
            const int g = pair.entity_truth[static_cast<std::size_t>(nn)];
            if (g >= 0 && pair.kg_g.entities()[static_cast<std::size_t>(g)] == e.g_symbol) {
                ++recovered;
            }
        } else {
            const int nn = pair.kg_nn.relation_index(e.nn_symbol);
            const int g = pair.relation_truth[static_cast<std::size_t>(nn)];
            if (g >= 0 && pair.kg_g.relations()[static_cast<std::size_t>(g)] == e.g_symbol) {
                ++recovered;
            }
        }
    }
    return static_cast<double>(recovered) / truth_total;
}

// ---------------------------------------------------------------------------
// digit corpus

namespace {

struct P {
    double x, y;
};

using Stroke = std::vector<P>;

void add_arc(std::vector<Stroke>& strokes, double cx, double cy, double rx, double ry,
             double a0, double a1, int segments = 14) {
    Stroke s;
    for (int i = 0; i <= segments; ++i) {
        const double a = a0 + (a1 - a0) * i / segments;
        s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
    strokes.push_back(std::move(s));
}

// Stroke skeletons on the 28x28 canvas, y pointing down. Shapes follow the
// usual print forms: loops are curves, "1"/"7" are straight, "4" and "8"
// contain a crossing.
std::vector<Stroke> digit_strokes(int digit) {
    constexpr double kPi = 3.14159265358979323846;
    std::vector<Stroke> s;
    switch (digit) {
    case 0:
        add_arc(s, 14, 14, 4.8, 7.0, 0, 2 * kPi, 20);
        break;
    case 1:
        s.push_back({{11.5, 8.5}, {14.8, 5.8}});
        s.push_back({{14.8, 5.8}, {14.8, 22.3}});
        break;
    case 2:
        add_arc(s, 14, 9.6, 4.6, 3.9, -kPi * 0.95, kPi * 0.25);
        s.push_back({{17.6, 12.4}, {9.2, 22.2}});
        s.push_back({{9.2, 22.2}, {19.2, 22.2}});
        break;
    case 3:
        add_arc(s, 13.4, 9.6, 4.4, 3.8, -kPi * 0.75, kPi * 0.42);
        add_arc(s, 13.4, 17.9, 4.8, 4.4, -kPi * 0.42, kPi * 0.75);
        break;
    case 4:
        s.push_back({{14.4, 5.8}, {8.2, 16.0}});
        s.push_back({{8.2, 16.0}, {19.8, 16.0}});
        s.push_back({{16.2, 8.2}, {16.2, 22.4}});
        break;
    case 5:
        s.push_back({{18.4, 6.0}, {10.2, 6.0}});
        s.push_back({{10.2, 6.0}, {9.8, 13.0}});
        add_arc(s, 13.2, 17.2, 5.0, 5.0, -kPi * 0.45, kPi * 0.78);
        break;
    case 6:
        s.push_back({{17.4, 5.8}, {12.4, 10.6}, {10.2, 15.4}});
        add_arc(s, 13.8, 17.8, 4.3, 4.6, 0, 2 * kPi, 18);
        break;
    case 7:
        s.push_back({{9.0, 6.4}, {19.0, 6.4}});
        s.push_back({{19.0, 6.4}, {12.0, 22.4}});
        break;
    case 8:
        add_arc(s, 14, 9.7, 3.7, 3.9, 0, 2 * kPi, 16);
        add_arc(s, 14, 17.9, 4.4, 4.6, 0, 2 * kPi, 16);
        break;
    case 9:
        add_arc(s, 13.9, 10.2, 4.2, 4.3, 0, 2 * kPi, 16);
        s.push_back({{18.1, 10.4}, {17.8, 16.0}, {16.2, 22.4}});
        break;
    default:
        throw InvalidArgument("digit_strokes: digit out of range");
    }
    return s;
}

double dist_to_segment(double px, double py, const P& a, const P& b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (a.x + t * vx);
    const double dy = py - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

double dist_to_strokes(double px, double py, const std::vector<Stroke>& strokes) {
    double best = 1e9;
    for (const auto& s : strokes) {
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            best = std::min(best, dist_to_segment(px, py, s[i], s[i + 1]));
        }
    }
    return best;
}

} // namespace

MnistDataset render_digit_corpus(int count, std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("render_digit_corpus: count must be >= 1");

    std::vector<std::vector<Stroke>> skeletons;
    for (int d = 0; d < 10; ++d) skeletons.push_back(digit_strokes(d));

    std::mt19937_64 rng(derive_seed(seed, seed_tag::kCorpus));
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    std::uniform_real_distribution<double> angle(-0.12, 0.12);
    std::uniform_real_distribution<double> scale(0.88, 1.10);
    std::uniform_real_distribution<double> width(1.1, 1.8);
    std::normal_distribution<double> noise(0.0, 0.04);

    MnistDataset ds;
    ds.count = count;
    ds.images.resize(static_cast<std::size_t>(count) * 784);
    ds.labels.resize(static_cast<std::size_t>(count));

    for (int i = 0; i < count; ++i) {
        const int digit = i % 10;
        ds.labels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(digit);
        const double dx = shift(rng);
        const double dy = shift(rng);
        const double th = angle(rng);
        const double sc = scale(rng);
        const double w = width(rng);
        const double ct = std::cos(-th);
        const double st = std::sin(-th);

        float* img = ds.images.data() + static_cast<std::size_t>(i) * 784;
        for (int py = 0; py < 28; ++py) {
            for (int px = 0; px < 28; ++px) {
                // map the pixel back into the canonical glyph frame
                const double qx = (px + 0.5) - 14.0 - dx;
                const double qy = (py + 0.5) - 14.0 - dy;
                const double cx = (ct * qx - st * qy) / sc + 14.0;
                const double cy = (st * qx + ct * qy) / sc + 14.0;
                double v = 0.0;
                if (std::abs(cx - 14.0) < 12.5 && std::abs(cy - 14.0) < 12.5) {
                    const double d = dist_to_strokes(cx, cy, skeletons[static_cast<std::size_t>(digit)]);
                    v = 1.0 / (1.0 + std::exp((d - w) / 0.35));
                }
                v += noise(rng);
                img[py * 28 + px] = static_cast<float>(
                    std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0);
            }
        }
    }
    return ds;
}

void write_digit_corpus(const std::filesystem::path& dir, int train_count, int test_count,
                        std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const MnistDataset train = render_digit_corpus(train_count, seed);
    const MnistDataset test = render_digit_corpus(test_count, mix_seed(seed) + 1);

    auto quantize = [](const MnistDataset& ds) {
        std::vector<std::uint8_t> bytes(ds.images.size());
        for (std::size_t i = 0; i < ds.images.size(); ++i) {
            bytes[i] = static_cast<std::uint8_t>(std::lround(ds.images[i] * 255.0f));
        }
        return bytes;
    };
    write_idx_images(dir / "train-images-idx3-ubyte", quantize(train), train.count, 28, 28);
    write_idx_labels(dir / "train-labels-idx1-ubyte", train.labels);
    write_idx_images(dir / "t10k-images-idx3-ubyte", quantize(test), test.count, 28, 28);
    write_idx_labels(dir / "t10k-labels-idx1-ubyte", test.labels);
}

} // namespace kgalign
