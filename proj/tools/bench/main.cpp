// Benchmark: serial reference scan vs the OpenMP scan over doubling corpus
// sizes. Verifies the two kernels agree byte-for-byte on every run and
// prints a throughput table.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "markerscan/counts.hpp"
#include "markerscan/lexicon.hpp"
#include "markerscan/matcher.hpp"
#include "markerscan/synth.hpp"

using namespace markerscan;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double median_time(F&& body, int reps) {
    std::vector<double> times;
    for (int i = 0; i < reps; ++i) {
        double t0 = now_s();
        body();
        times.push_back(now_s() - t0);
    }
    std::sort(times.begin(), times.end());
    return times[static_cast<std::size_t>(reps / 2)];
}

}  // namespace

int main(int argc, char** argv) {
    int64_t base = argc > 1 ? std::atoll(argv[1]) : 25000;
    int doublings = argc > 2 ? std::atoi(argv[2]) : 3;
    int jobs = argc > 3 ? std::atoi(argv[3]) : 0;  // 0 = all cores
    int reps = 3;

    AnalysisSuite suite = builtin_suite();
    MatchEngine engine(suite);

    SynthConfig cfg;
    cfg.vocab_size = 5000;
    cfg.len_min = 150;
    cfg.len_max = 400;
    cfg.abs_min = 150;
    cfg.abs_max = 400;
    cfg.title_tokens = 8;
    cfg.group_probs = {{"control", 0.10}, {"A", 0.10}, {"B", 0.05}, {"C", 0.0345}, {"D", 0.02}};
    cfg.seed = 7;

    std::printf("scan benchmark: serial reference vs OpenMP (jobs=%d), median of %d runs\n", jobs,
                reps);
    std::printf("%10s %12s %12s %8s %12s %s\n", "docs", "serial_s", "parallel_s", "speedup",
                "Mtok/s(par)", "agree");

    double prev_par = 0.0;
    bool all_agree = true;
    for (int step = 0; step <= doublings; ++step) {
        int64_t size = base << step;
        cfg.years = {{2024, size}};
        SynthGenerator gen(cfg, suite);
        std::vector<Document> docs;
        docs.reserve(static_cast<std::size_t>(size));
        int64_t bytes = 0;
        for (int64_t i = 0; i < size; ++i) {
            docs.push_back(gen.make_document(2024, i));
            const Document& d = docs.back();
            bytes += static_cast<int64_t>(d.title.size() + d.abstract.size() + d.body.size());
        }

        CountsTable serial_table, parallel_table;
        double t_serial = median_time(
            [&] { serial_table = scan_documents(docs, engine, SectionScope::FullText); }, reps);
        double t_par = median_time(
            [&] {
                parallel_table =
                    scan_documents_parallel(docs, engine, SectionScope::FullText, jobs);
            },
            reps);

        bool agree = counts_csv(serial_table) == counts_csv(parallel_table);
        all_agree = all_agree && agree;
        // ~5.5 bytes per token in the generated corpora
        double mtok = static_cast<double>(bytes) / 5.5 / 1e6 / t_par;
        std::printf("%10lld %12.3f %12.3f %7.2fx %12.1f %s", static_cast<long long>(size),
                    t_serial, t_par, t_serial / t_par, mtok, agree ? "yes" : "NO");
        if (step > 0) std::printf("   growth %.2fx", t_par / prev_par);
        std::printf("\n");
        prev_par = t_par;
    }
    if (!all_agree) {
        std::printf("ERROR: kernels disagree\n");
        return 1;
    }
    return 0;
}
