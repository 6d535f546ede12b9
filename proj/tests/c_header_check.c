/* Compiles the public header as C and touches a few entry points. */
#include <bemrt/bemrt.h>
#include <stdio.h>

int main(void) {
  bemrt_mesh* mesh = NULL;
  bemrt_validation v;
  if (bemrt_mesh_generate_cube(1.0, 1, &mesh) != BEMRT_OK) return 1;
  if (bemrt_mesh_validate(mesh, &v) != BEMRT_OK || v.elements != 24) return 1;
  bemrt_mesh_free(mesh);
  printf("%s\n", bemrt_version());
  return 0;
}
