#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

#include "flowmem/error.hpp"

namespace flowmem::detail {

namespace {

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t count) {
    auto* raw = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)));
    if (raw == nullptr) throw Error("fftw_malloc failed");
    return std::unique_ptr<T[], FftwFree>(raw);
}

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {
        if (plan_ == nullptr) throw Error("FFTW plan creation failed");
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> forward_real_dft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    const std::size_t bins = n / 2 + 1;
    auto in = fftw_buffer<double>(n);
    auto out = fftw_buffer<fftw_complex>(bins);

    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = std::make_unique<Plan>(
            fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    }
    std::copy(x.begin(), x.end(), in.get());
    plan->execute();

    std::vector<std::complex<double>> result(bins);
    for (std::size_t k = 0; k < bins; ++k) result[k] = {out[k][0], out[k][1]};
    return result;
}

std::vector<double> backward_real_dft(std::span<const std::complex<double>> half, std::size_t n) {
    if (n == 0) return {};
    const std::size_t bins = n / 2 + 1;
    if (half.size() != bins) throw Error("backward_real_dft: spectrum size mismatch");
    auto in = fftw_buffer<fftw_complex>(bins);
    auto out = fftw_buffer<double>(n);

    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(planner_mutex());
        // c2r destroys its input; FFTW_ESTIMATE planning does not touch the arrays.
        plan = std::make_unique<Plan>(
            fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    }
    for (std::size_t k = 0; k < bins; ++k) {
        in[k][0] = half[k].real();
        in[k][1] = half[k].imag();
    }
    plan->execute();
    return std::vector<double>(out.get(), out.get() + n);
}

}  // namespace flowmem::detail
