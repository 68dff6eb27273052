#include "pf/polycone.hpp"
#include "pf/qform.hpp"
#include "pf/voronoi.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <string>

using namespace pf;

namespace {

const ConeV& domainOf(const std::string& name) {
    static std::map<std::string, ConeV> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, perfectDomain(catalogForm(name))).first;
    return it->second;
}

void run(benchmark::State& state, const std::string& name, bool parallel) {
    const ConeV& cone = domainOf(name);
    DualDescriptionOptions opts;
    opts.validate = false;
    opts.parallel = parallel;
    std::size_t facets = 0;
    for (auto _ : state) {
        auto f = facetsOf(cone, opts);
        facets = f.size();
        benchmark::DoNotOptimize(f);
    }
    state.counters["rays"] = static_cast<double>(cone.rays.size());
    state.counters["facets"] = static_cast<double>(facets);
}

} // namespace

BENCHMARK_CAPTURE(run, D5_serial, std::string("D5"), false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, D5_parallel, std::string("D5"), true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, D6_serial, std::string("D6"), false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, D6_parallel, std::string("D6"), true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, E6_serial, std::string("E6"), false)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK_CAPTURE(run, E6_parallel, std::string("E6"), true)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
