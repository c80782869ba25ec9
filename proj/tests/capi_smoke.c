/*
 * Copyright 2026 The relaysel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* The public header must be usable from plain C. */

#include <math.h>
#include <stdio.h>

#include "relaysel/relaysel.h"

int main(void) {
  double v = 0.0;
  rsel_table* table = NULL;
  rsel_optimum row;

  if (rsel_avg_slots(1, 1.088, NULL, &v) != RSEL_OK || fabs(v - 2.4665) > 1e-3) {
    fprintf(stderr, "avg_slots failed: %s\n", rsel_last_error());
    return 1;
  }
  if (rsel_table_create(2, NULL, &table) != RSEL_OK) {
    fprintf(stderr, "table failed: %s\n", rsel_last_error());
    return 1;
  }
  if (rsel_table_row(table, 1, &row) != RSEL_OK || row.q != 2) {
    rsel_table_destroy(table);
    return 1;
  }
  rsel_table_destroy(table);
  if (rsel_avg_slots(1, 0.0, NULL, &v) != RSEL_ERR_INVALID_ARGUMENT) return 1;
  printf("ok\n");
  return 0;
}
