#include "coorbit/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace coorbit::fft {
namespace {

std::mutex planner_mutex;

struct Plan {
    fftw_plan handle = nullptr;
    ~Plan() {
        if (handle) {
            std::lock_guard<std::mutex> lock(planner_mutex);
            fftw_destroy_plan(handle);
        }
    }
};

// Plans are made on a scratch buffer and run with fftw_execute_dft, so they
// only need matching size and alignment.
fftw_plan plan_for(std::size_t n, int sign) {
    thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<Plan>> cache;
    auto& slot = cache[{n, sign}];
    if (!slot) {
        slot = std::make_unique<Plan>();
        std::lock_guard<std::mutex> lock(planner_mutex);
        auto* scratch = fftw_alloc_complex(n);
        slot->handle = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
    }
    return slot->handle;
}

void run(Complex* data, std::size_t n, int sign) {
    if (n == 0) return;
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_for(n, sign), p, p);
}

}  // namespace

void forward(std::vector<Complex>& data) { run(data.data(), data.size(), FFTW_FORWARD); }
void backward(std::vector<Complex>& data) { run(data.data(), data.size(), FFTW_BACKWARD); }
void forward(Complex* data, std::size_t n) { run(data, n, FFTW_FORWARD); }
void backward(Complex* data, std::size_t n) { run(data, n, FFTW_BACKWARD); }

}  // namespace coorbit::fft
