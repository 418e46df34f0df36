#pragma once

namespace calibra {

// OpenMP's thread budget capped by the CALIBRA_THREADS variable; 1 when
// built without OpenMP.  Kernels split work into fixed index ranges per
// thread so results never depend on the schedule.
int thread_count();

}  // namespace calibra
