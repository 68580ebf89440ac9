from anticanon_lab.cli import main

raise SystemExit(main())
