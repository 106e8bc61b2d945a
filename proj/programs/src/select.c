/* k-th smallest element by quickselect, checked by counting. */
#define N 50
int arr[N], work[N];

static int select_kth(int *a, int n, int k) {
  int lo = 0, hi = n - 1;
  while (lo < hi) {
    int pivot = a[(lo + hi) / 2];
    int i = lo, j = hi;
    while (i <= j) {
      while (a[i] < pivot) i++;
      while (a[j] > pivot) j--;
      if (i <= j) {
        int t = a[i];
        a[i] = a[j];
        a[j] = t;
        i++;
        j--;
      }
    }
    if (k <= j) hi = j;
    else if (k >= i) lo = i;
    else break;
  }
  return a[k];
}

int main(void) {
  for (int i = 0; i < N; i++) arr[i] = (i * 7919) % 101 - 50;
  int bad = 0;
  for (int k = 0; k < N; k += 7) {
    for (int i = 0; i < N; i++) work[i] = arr[i];
    int v = select_kth(work, N, k);
    int less = 0, le = 0;
    for (int i = 0; i < N; i++) {
      less += arr[i] < v;
      le += arr[i] <= v;
    }
    bad |= !(less <= k && k < le);
  }
  return bad;
}
