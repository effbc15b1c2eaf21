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

#pragma once

#include <complex>

namespace cranloc::detail
{

/// Batched forward DFT (e^{-i 2 pi k n / N}) of `howmany` contiguous columns of length n.
/// Plans are cached process-wide; execution is safe from multiple threads.
class BatchedFft
{
public:
    BatchedFft(int n, int howmany);

    void forward(const std::complex<double> *in, std::complex<double> *out) const;

    int size() const { return n_; }

private:
    int n_;
    int howmany_;
    void *plan_;
};

} // namespace cranloc::detail
