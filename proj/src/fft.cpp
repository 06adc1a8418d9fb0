#include "nprach/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace nprach {

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x, bool inverse)
{
    std::vector<std::complex<double>> in = x;
    std::vector<std::complex<double>> out(x.size());
    if (x.empty())
        return out;
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        // Only fftw_execute is thread-safe.
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(x.size()), pin, pout, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace nprach
