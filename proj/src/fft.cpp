// SPDX-License-Identifier: Apache-2.0
//
// cranloc: source localization over capacity-limited C-RAN fronthaul
// Copyright (C) 2026 The cranloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fft.hpp"

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace cranloc::detail
{

namespace
{
std::mutex plan_mutex;

// Plans live for the whole process; FFTW planning itself is not thread-safe.
fftw_plan cached_plan(int n, int howmany)
{
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard lock(plan_mutex);
    auto it = plans.find({n, howmany});
    if (it != plans.end())
        return it->second;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(n) * howmany);
    std::vector<std::complex<double>> out(in.size());
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, reinterpret_cast<fftw_complex *>(in.data()), nullptr, 1, n,
                                        reinterpret_cast<fftw_complex *>(out.data()), nullptr, 1, n, FFTW_FORWARD,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(std::make_pair(n, howmany), plan);
    return plan;
}
} // namespace

BatchedFft::BatchedFft(int n, int howmany)
    : n_(n), howmany_(howmany), plan_(cached_plan(n, howmany))
{
}

void BatchedFft::forward(const std::complex<double> *in, std::complex<double> *out) const
{
    // new-array execute does not modify the input for out-of-place complex transforms
    fftw_execute_dft(static_cast<fftw_plan>(plan_),
                     reinterpret_cast<fftw_complex *>(const_cast<std::complex<double> *>(in)),
                     reinterpret_cast<fftw_complex *>(out));
}

} // namespace cranloc::detail
