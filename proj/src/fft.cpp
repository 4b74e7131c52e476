#include "sct/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "sct/common.hpp"

namespace sct {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (rows, cols, direction) with FFTW_ESTIMATE
// so results do not depend on runtime measurements.
class PlanCache {
public:
    fftw_plan get(int rows, int cols, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(rows, cols, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> tmp(static_cast<size_t>(rows) * cols);
        auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
        fftw_plan plan = fftw_plan_dft_2d(rows, cols, p, p, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw NumericalError("fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void fft2(std::vector<cplx>& data, int rows, int cols, bool forward) {
    if (rows < 1 || cols < 1 ||
        data.size() != static_cast<size_t>(rows) * cols) {
        throw ArgumentError("fft2: size mismatch");
    }
    const int sign = forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = cache().get(rows, cols, sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

}  // namespace sct
