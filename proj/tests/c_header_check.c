/* Compiles the public header as C and exercises a minimal round trip. */
#include <stdio.h>
#include <string.h>

#include "skinseg/skinseg.h"

int main(void) {
  uint8_t px[4 * 3] = {150, 80, 60, 95, 80, 60, 150, 80, 60, 0, 0, 0};
  uint8_t mask[4];
  skinseg_image *img = NULL;
  if (skinseg_image_create(2, 2, px, &img) != SKINSEG_OK) return 1;
  if (skinseg_baseline_rule(img, SKINSEG_RULE_DAYLIGHT, mask) != SKINSEG_OK) return 2;
  skinseg_image_free(img);
  if (mask[0] != 255 || mask[1] != 0 || mask[2] != 255 || mask[3] != 0) return 3;
  if (skinseg_image_create(0, 2, px, &img) != SKINSEG_ERR_INVALID_ARGUMENT) return 4;
  if (strlen(skinseg_last_error()) == 0) return 5;
  printf("skinseg %s\n", skinseg_version());
  return 0;
}
